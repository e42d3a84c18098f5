//! Randomized consistency driver: generates small instances and checks the
//! fast decision against the brute-force oracle, the symmetry of the
//! decided property, and the agreement of the overlapping case procedures.

use gtes_union::decide::{case2_check, npdfs, CaseTag};
use gtes_union::gtes::Equation;
use gtes_union::oracle;
use gtes_union::{decide_union, Gtes, Signature, Term};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Bounds on generated instances.
#[derive(Debug, Clone, Copy)]
pub struct FuzzParams {
    pub max_symbols: usize,
    pub max_arity: usize,
    pub max_height: usize,
    pub max_equations: usize,
    /// Height bound for the oracle cross-check.
    pub oracle_height: usize,
}

impl Default for FuzzParams {
    fn default() -> Self {
        FuzzParams {
            max_symbols: 4,
            max_arity: 2,
            max_height: 3,
            max_equations: 5,
            oracle_height: 4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FuzzFailure {
    pub seed: u64,
    pub index: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct FuzzSummary {
    pub count: usize,
    pub ok: usize,
    pub failures: Vec<FuzzFailure>,
    /// Instances per main case, in declaration order of the tags.
    pub case_counts: [usize; 4],
    /// Instances where the unary and both-total procedures overlapped and
    /// were compared against each other.
    pub overlap_checked: usize,
    pub yes_verdicts: usize,
}

/// Deterministic per-instance rng derived from the run seed.
pub fn instance_rng(seed: u64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Generates one random instance within the parameter bounds.
pub fn random_instance(rng: &mut ChaCha8Rng, params: &FuzzParams) -> (Signature, Gtes, Gtes) {
    let constants = rng.gen_range(1..=2usize);
    let higher = rng.gen_range(0..=params.max_symbols.saturating_sub(constants).min(2));
    let names = ["a", "b", "f", "g"];
    let mut decls: Vec<(String, usize)> = Vec::new();
    for name in &names[..constants] {
        decls.push((name.to_string(), 0));
    }
    for name in &names[2..2 + higher] {
        decls.push((name.to_string(), rng.gen_range(1..=params.max_arity)));
    }
    let sig = Signature::new(decls).expect("generated signature has a constant");

    let e = random_gtes(rng, &sig, params);
    let f = random_gtes(rng, &sig, params);
    (sig, e, f)
}

fn random_gtes(rng: &mut ChaCha8Rng, sig: &Signature, params: &FuzzParams) -> Gtes {
    let count = rng.gen_range(0..=params.max_equations);
    let (g, _) = Gtes::from_equations((0..count).map(|_| {
        Equation::new(
            random_term(rng, sig, params.max_height),
            random_term(rng, sig, params.max_height),
        )
    }));
    g
}

pub fn random_term(rng: &mut ChaCha8Rng, sig: &Signature, height: usize) -> Term {
    let symbols: Vec<_> = if height == 0 {
        sig.constants().collect()
    } else {
        // Lean towards small terms so subterm sets stay readable.
        if rng.gen_bool(0.4) {
            sig.constants().collect()
        } else {
            sig.symbols().collect()
        }
    };
    let symbol = symbols[rng.gen_range(0..symbols.len())];
    let children = (0..sig.arity(symbol))
        .map(|_| random_term(rng, sig, height - 1))
        .collect();
    Term::new(sig, symbol, children).expect("arity respected by construction")
}

fn check_instance(
    sig: &Signature,
    e: &Gtes,
    f: &Gtes,
    params: &FuzzParams,
    summary: &mut FuzzSummary,
) -> Result<(), String> {
    let forward = decide_union(sig, e, f);
    summary.case_counts[match forward.verdict.case.tag {
        CaseTag::Unary => 0,
        CaseTag::BothTotal => 1,
        CaseTag::OneTotalHigherArity => 2,
        CaseTag::NoneTotalHigherArity => 3,
    }] += 1;
    if forward.verdict.union_is_congruence {
        summary.yes_verdicts += 1;
    }
    let backward = decide_union(sig, f, e);
    let yes = forward.verdict.union_is_congruence;
    if yes != backward.verdict.union_is_congruence {
        return Err(format!(
            "verdict not symmetric: E,F gives {yes}, F,E gives {}",
            backward.verdict.union_is_congruence
        ));
    }

    let (used_height, found) = oracle::counterexample_search_auto(sig, e, f, params.oracle_height)
        .map_err(|err| format!("oracle failed: {err}"))?;
    match (yes, &found) {
        (true, Some((s, t))) => {
            return Err(format!(
                "verdict yes but oracle counterexample at height <= {used_height}: {} = {}",
                s.to_text(sig),
                t.to_text(sig)
            ));
        }
        (false, None) => {
            // A missing counterexample within the bound does not refute a
            // no verdict; witnesses may be taller than any fixed bound.
        }
        _ => {}
    }

    // Size bounds the construction promises. The rewrite systems fit in
    // the subterm set plus one fresh constant per subterm; the backsteps
    // fit in the rules; the graph has at most one arc per input symbol.
    let n = e.size() + f.size();
    let cad = &forward.cad;
    let subterm_size: u64 = cad.dag.term_sizes().iter().sum();
    let bound = subterm_size.saturating_add(cad.dag.len() as u64);
    for rules in [&cad.rules_e, &cad.rules_f, &cad.rules_u] {
        if rules.len() > cad.dag.len()
            || rules.bstep().len() > rules.size()
            || rules.size() as u64 > bound
        {
            return Err("rule or backstep size bound violated".to_string());
        }
    }
    if cad.aux.arc_count() > n {
        return Err("auxiliary graph has more arcs than the input size".to_string());
    }

    if sig.is_unary() && forward.total_e && forward.total_f {
        summary.overlap_checked += 1;
        let by_search = npdfs(&forward.cad.aux);
        let by_counts = case2_check(&forward.cad.inc);
        if by_search != by_counts {
            return Err(format!(
                "unary and both total, but npdfs gives {by_search} and the class-count check gives {by_counts}"
            ));
        }
        if by_search != yes {
            return Err("overlap checks disagree with the verdict".to_string());
        }
    }
    if forward.verdict.case.tag == CaseTag::BothTotal
        && !yes
        && forward.verdict.diagnostics.is_none()
    {
        return Err("no verdict without diagnostics".to_string());
    }
    Ok(())
}

/// Runs `count` random instances and collects failures with their seeds.
pub fn fuzz_run(seed: u64, count: usize, params: &FuzzParams) -> FuzzSummary {
    let mut summary = FuzzSummary {
        count,
        ..FuzzSummary::default()
    };
    for index in 0..count {
        let mut rng = instance_rng(seed, index);
        let (sig, e, f) = random_instance(&mut rng, params);
        match check_instance(&sig, &e, &f, params, &mut summary) {
            Ok(()) => summary.ok += 1,
            Err(reason) => summary.failures.push(FuzzFailure {
                seed,
                index,
                reason,
            }),
        }
    }
    summary
}
