//! One function per subcommand. Each fills in defaults on its parameter
//! struct, so the struct that comes back doubles as the config echo.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use euclidlab_core::closure::{
    closure_run, StopReason, DEFAULT_CAP, DEFAULT_MAX_GENERATIONS, DEFAULT_SUBSET_BUDGET,
};
use euclidlab_core::diophantine::{
    construct_example_13, construct_example_14, lemma8_scan, pillai_scan, Lemma8Bounds,
    PillaiBounds, DEFAULT_PILLAI_BUDGET, DEFAULT_ROOT_BOUND, DEFAULT_SAMPLE_ELEMENTS,
    DEFAULT_SAMPLE_SEED, DEFAULT_SAMPLE_SUBSETS,
};
use euclidlab_core::witness::{
    negative_example_extend, scan_relaxation, verify_theorem1, witness_search, PrimePool,
    RelaxationScan, DEFAULT_EXTENSION_LIMIT, DEFAULT_SCAN_BUDGET,
};
use euclidlab_core::zsigmondy::{self, ZsigmondyQuery};
use euclidlab_core::{Error, PrimePowerInstance, Sign, SignAssignment, SubsetFamily};
use log::info;
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::args::{List, PoolArg, SignArg, SubsetList};
use crate::{default_budget, Failure, EXIT_BUDGET, EXIT_OK, EXIT_VIOLATION};

pub(crate) type Ran = (Value, Value, i32);

/// Declares a parameter struct whose fields are all optional long flags and
/// config keys, plus the merge that lets flags win over the file.
macro_rules! params {
    ($(#[$m:meta])* $name:ident { $($(#[$fm:meta])* $field:ident : $ty:ty),* $(,)? }) => {
        $(#[$m])*
        #[derive(Clone, Debug, Default, clap::Args, Serialize, Deserialize)]
        #[serde(rename_all = "kebab-case", deny_unknown_fields)]
        pub struct $name {
            $(
                $(#[$fm])*
                #[arg(long, allow_hyphen_values = true)]
                #[serde(default, skip_serializing_if = "Option::is_none")]
                pub $field: Option<$ty>,
            )*
        }

        impl $name {
            pub fn merge(self, file: Self) -> Self {
                Self { $($field: self.$field.or(file.$field),)* }
            }
        }
    };
}

params!(Theorem1Params {
    /// Primes p_1 < ... < p_n, e.g. `2,3,5`.
    primes: List<u64>,
    /// Exponents, one per prime.
    exponents: List<u32>,
    /// Extra subsets added to the family, e.g. `1,2;2,3`.
    extra: SubsetList,
});

params!(ScanParams {
    n_min: usize,
    n_max: usize,
    /// `smallest` (first n primes) or the largest prime to draw from.
    pool: PoolArg,
    exponent_bound: u32,
    /// Subset sizes making up the family.
    sizes: List<usize>,
    /// `+1`, `-1` or `both`.
    sign: SignArg,
    budget: u64,
});

params!(ClosureParams {
    seed: List<u64>,
    epsilon: SignArg,
    prime_bound: u64,
    cap: usize,
    /// Largest number of subsets one step may expand.
    budget: u64,
    max_generations: u32,
    /// Print the full derivation chain for this prime.
    certify: u64,
});

params!(ZsigmondyParams {
    a: u64,
    b: u64,
    n: u32,
});

params!(Lemma8Params {
    q_bound: u64,
    x_bound: u32,
    y_bound: u32,
    z_bound: u32,
});

params!(PillaiParams {
    b: i64,
    /// Primes allowed in A and B.
    primes: List<u64>,
    a_bound: u64,
    coefficient_bound: u64,
    exponent_bound: u32,
    budget: u64,
});

params!(Example13Params {
    q: List<u64>,
    elements: usize,
    subsets: usize,
    seed: u64,
});

params!(Example14Params {
    q: List<u64>,
    epsilon: SignArg,
    elements: usize,
    root_bound: u64,
});

params!(WitnessParams {
    /// Instance JSON file; replaces the other instance flags.
    instance: PathBuf,
    primes: List<u64>,
    exponents: List<u32>,
    sizes: List<usize>,
    subsets: SubsetList,
    sign: SignArg,
});

params!(NegativeExampleParams {
    primes: List<u64>,
    exponents: List<u32>,
    sizes: List<usize>,
    subsets: SubsetList,
    /// Only consider the family with this sign.
    sign: SignArg,
    prime_limit: u64,
});

fn required<T: Clone>(v: &Option<T>, key: &str) -> Result<T, Failure> {
    v.clone()
        .ok_or_else(|| Failure::config(format!("missing required parameter `{key}`")))
}

fn echo<T: Serialize>(params: &T) -> Value {
    serde_json::to_value(params).expect("parameters serialize")
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

fn family_from(
    n: usize,
    sizes: &Option<List<usize>>,
    subsets: &Option<SubsetList>,
) -> Result<SubsetFamily, Failure> {
    match (sizes, subsets) {
        (None, None) => Ok(SubsetFamily::all_proper(n)?),
        _ => Ok(SubsetFamily::new(
            n,
            sizes.clone().unwrap_or_default().0,
            subsets.clone().unwrap_or_default().0,
        )?),
    }
}

pub(crate) fn theorem1(mut p: Theorem1Params) -> Result<Ran, Failure> {
    let primes = required(&p.primes, "primes")?.0;
    let exponents = p
        .exponents
        .get_or_insert_with(|| List(vec![1; primes.len()]))
        .0
        .clone();
    let extra = p.extra.get_or_insert_with(SubsetList::default).0.clone();
    info!("outside-prime check on {primes:?} with exponents {exponents:?}");
    match verify_theorem1(&primes, &exponents, &extra) {
        Ok(out) => Ok((
            echo(&p),
            json!({"holds": true, "plus": to_json(&out.plus), "minus": to_json(&out.minus)}),
            EXIT_OK,
        )),
        Err(Error::TheoremViolation { sign, report }) => Ok((
            echo(&p),
            json!({"holds": false, "violation_sign": sign, "report": to_json(&report)}),
            EXIT_VIOLATION,
        )),
        Err(e) => Err(e.into()),
    }
}

pub(crate) fn scan(mut p: ScanParams) -> Result<Ran, Failure> {
    let n_min = required(&p.n_min, "n-min")?;
    let n_max = *p.n_max.get_or_insert(n_min);
    let pool = *p.pool.get_or_insert(PoolArg::Smallest);
    let exponent_bound = *p.exponent_bound.get_or_insert(1);
    let sizes = required(&p.sizes, "sizes")?.0;
    let signs = p.sign.get_or_insert(SignArg::Both).signs();
    let budget = match p.budget {
        Some(b) => b,
        None => *p.budget.insert(default_budget(DEFAULT_SCAN_BUDGET)?),
    };
    let scan = RelaxationScan {
        n_min,
        n_max,
        pool: match pool {
            PoolArg::Smallest => PrimePool::Smallest,
            PoolArg::UpTo(b) => PrimePool::UpTo(b),
        },
        exponent_bound,
        sizes,
        signs,
        budget,
    };
    info!("scanning {} instances", scan.instance_count());
    let out = scan_relaxation(&scan)?;
    let code = if out.candidates.is_empty() {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    };
    Ok((echo(&p), to_json(&out), code))
}

pub(crate) fn closure(mut p: ClosureParams) -> Result<Ran, Failure> {
    let seed: Vec<BigUint> = required(&p.seed, "seed")?
        .0
        .into_iter()
        .map(BigUint::from)
        .collect();
    let eps = p
        .epsilon
        .get_or_insert(SignArg::One(Sign::Plus))
        .single("epsilon")
        .map_err(Failure::config)?;
    let prime_bound = *p.prime_bound.get_or_insert(100);
    let cap = *p.cap.get_or_insert(DEFAULT_CAP);
    let max_generations = *p.max_generations.get_or_insert(DEFAULT_MAX_GENERATIONS);
    let budget = match p.budget {
        Some(b) => b,
        None => *p.budget.insert(default_budget(DEFAULT_SUBSET_BUDGET)?),
    };
    let run = closure_run(&seed, eps, prime_bound, max_generations, cap, budget)?;
    for g in &run.report.generations {
        info!(
            "generation {}: {} subsets, {} new primes, {} elements",
            g.generation,
            g.subsets_expanded,
            g.new_primes.len(),
            g.element_count
        );
    }
    let certificates: BTreeMap<String, Value> = run
        .certificates()
        .into_iter()
        .map(|(q, chain)| (q.to_string(), to_json(&chain)))
        .collect();
    let mut result = json!({"coverage": to_json(&run.report), "certificates": certificates});
    if let Some(q) = p.certify {
        let chain = run.state.certify(&BigUint::from(q))?;
        result["certificate"] = json!({
            "prime": q.to_string(),
            "verified": run.state.verify_chain(&chain),
            "chain": to_json(&chain),
        });
    }
    let code = if run.report.stop_reason == StopReason::Covered {
        EXIT_OK
    } else {
        EXIT_BUDGET
    };
    Ok((echo(&p), result, code))
}

pub(crate) fn zsigmondy(mut p: ZsigmondyParams) -> Result<Ran, Failure> {
    let a = required(&p.a, "a")?;
    let b = *p.b.get_or_insert(1);
    let n = required(&p.n, "n")?;
    let query = ZsigmondyQuery::new(a, b, n)?;
    Ok((echo(&p), to_json(&zsigmondy::report(&query)), EXIT_OK))
}

pub(crate) fn lemma8(mut p: Lemma8Params) -> Result<Ran, Failure> {
    let bounds = Lemma8Bounds {
        q_bound: *p.q_bound.get_or_insert(1000),
        x_bound: *p.x_bound.get_or_insert(30),
        y_bound: *p.y_bound.get_or_insert(30),
        z_bound: *p.z_bound.get_or_insert(30),
    };
    match lemma8_scan(bounds) {
        Ok(solutions) => Ok((
            echo(&p),
            json!({"classification_holds": true, "solutions": solutions, "violations": []}),
            EXIT_OK,
        )),
        Err(Error::LemmaViolation {
            solutions,
            violations,
        }) => Ok((
            echo(&p),
            json!({"classification_holds": false, "solutions": solutions, "violations": violations}),
            EXIT_VIOLATION,
        )),
        Err(e) => Err(e.into()),
    }
}

pub(crate) fn pillai(mut p: PillaiParams) -> Result<Ran, Failure> {
    let b = required(&p.b, "b")?;
    let primes: BTreeSet<u64> = p
        .primes
        .get_or_insert_with(List::default)
        .0
        .iter()
        .copied()
        .collect();
    let bounds = PillaiBounds {
        a_bound: *p.a_bound.get_or_insert(50),
        coefficient_bound: *p.coefficient_bound.get_or_insert(1),
        exponent_bound: *p.exponent_bound.get_or_insert(12),
    };
    let budget = match p.budget {
        Some(b) => b,
        None => *p.budget.insert(default_budget(DEFAULT_PILLAI_BUDGET)?),
    };
    let solutions = pillai_scan(b, &primes, bounds, budget)?;
    Ok((
        echo(&p),
        json!({"count": solutions.len(), "solutions": solutions}),
        EXIT_OK,
    ))
}

pub(crate) fn example13(mut p: Example13Params) -> Result<Ran, Failure> {
    let qs = required(&p.q, "q")?.0;
    let elements = *p.elements.get_or_insert(DEFAULT_SAMPLE_ELEMENTS);
    let subsets = *p.subsets.get_or_insert(DEFAULT_SAMPLE_SUBSETS);
    let seed = *p.seed.get_or_insert(DEFAULT_SAMPLE_SEED);
    let report = construct_example_13(&qs, elements, subsets, seed)?;
    let code = if report.residues_hold && report.coverage_matches {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    };
    Ok((echo(&p), to_json(&report), code))
}

pub(crate) fn example14(mut p: Example14Params) -> Result<Ran, Failure> {
    let qs = required(&p.q, "q")?.0;
    let eps = p
        .epsilon
        .get_or_insert(SignArg::One(Sign::Plus))
        .single("epsilon")
        .map_err(Failure::config)?;
    let elements = *p.elements.get_or_insert(DEFAULT_SAMPLE_ELEMENTS);
    let root_bound = *p.root_bound.get_or_insert(DEFAULT_ROOT_BOUND);
    let report = construct_example_14(&qs, eps, elements, root_bound)?;
    let code = if report.every_prime_divides && report.no_element_divisible {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    };
    Ok((echo(&p), to_json(&report), code))
}

pub(crate) fn witness(mut p: WitnessParams) -> Result<Ran, Failure> {
    let inst = match &p.instance {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::config(format!("instance {}: {e}", path.display())))?;
            PrimePowerInstance::from_json(&text)?
        }
        None => {
            let primes = required(&p.primes, "primes")?.0;
            let n = primes.len();
            let exponents = p
                .exponents
                .get_or_insert_with(|| List(vec![1; n]))
                .0
                .clone();
            let family = family_from(n, &p.sizes, &p.subsets)?;
            let sign = p
                .sign
                .get_or_insert(SignArg::One(Sign::Plus))
                .single("sign")
                .map_err(Failure::config)?;
            PrimePowerInstance::new(primes, exponents, family, SignAssignment::constant(sign))?
        }
    };
    let report = witness_search(&inst);
    Ok((
        echo(&p),
        json!({"instance": to_json(&inst.to_doc()), "report": to_json(&report)}),
        EXIT_OK,
    ))
}

pub(crate) fn negative_example(mut p: NegativeExampleParams) -> Result<Ran, Failure> {
    let primes = required(&p.primes, "primes")?.0;
    let n = primes.len();
    let exponents = p
        .exponents
        .get_or_insert_with(|| List(vec![1; n]))
        .0
        .clone();
    let family = family_from(n, &p.sizes, &p.subsets)?;
    let signs = match p.sign {
        Some(s) => Some(SignAssignment::constant(
            s.single("sign").map_err(Failure::config)?,
        )),
        None => None,
    };
    let limit = *p.prime_limit.get_or_insert(DEFAULT_EXTENSION_LIMIT);
    let ex = negative_example_extend(&primes, &exponents, &family, signs.as_ref(), limit)?;
    // without a sign map the construction must hold for both constant signs
    let checks: Vec<Value> = match &signs {
        Some(_) => vec![to_json(&witness_search(&ex.instance))],
        None => Sign::BOTH
            .iter()
            .map(|&s| {
                let inst = PrimePowerInstance::new(
                    ex.instance.primes().to_vec(),
                    ex.instance.exponents().to_vec(),
                    ex.instance.family().clone(),
                    SignAssignment::constant(s),
                )?;
                Ok(to_json(&witness_search(&inst)))
            })
            .collect::<Result<_, Error>>()?,
    };
    let absent = checks.iter().all(|r| r["found"] == json!(false));
    let source = ex.source.as_ref().map(
        |(subset, sign, value)| json!({"subset": subset, "sign": sign, "value": value.to_string()}),
    );
    let result = json!({
        "instance": to_json(&ex.instance.to_doc()),
        "greatest_prime": ex.greatest_prime,
        "source": source,
        "absent": absent,
        "witness_reports": checks,
    });
    Ok((
        echo(&p),
        result,
        if absent { EXIT_OK } else { EXIT_VIOLATION },
    ))
}
