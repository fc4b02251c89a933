use gapcode::gapshift::DEFAULT_TOL;
use gapcode::{EventuallyPeriodicSet, GapShift};
use proptest::prelude::*;

/// Spectral radius of the chain presentation of `X(S)` by plain power
/// iteration on `A + I`.
fn perron_of_presentation(s: &EventuallyPeriodicSet) -> f64 {
    let top = if s.is_finite() {
        s.max().unwrap()
    } else {
        s.threshold() + s.period()
    } as usize;
    // vertex 0 is the marker, vertex k the k-th zero after it
    let n = top + 1;
    let mut succ: Vec<Vec<usize>> = vec![vec![]; n];
    for k in 0..=top {
        if s.contains(k as u64) {
            succ[k].push(0);
        }
        if k < top {
            succ[k].push(k + 1);
        }
    }
    if !s.is_finite() {
        succ[top].push(s.threshold() as usize + 1);
    }
    // the chain is irreducible and A + I is primitive, so the
    // Collatz-Wielandt bounds close in on the spectral radius
    let mut x = vec![1.0f64; n];
    let (mut lo, mut hi) = (0.0, f64::INFINITY);
    for _ in 0..200_000 {
        let mut y = x.clone();
        for (u, out) in succ.iter().enumerate() {
            for &v in out {
                y[u] += x[v];
            }
        }
        let ratios = y.iter().zip(&x).map(|(a, b)| a / b);
        lo = ratios.clone().fold(f64::INFINITY, f64::min);
        hi = ratios.fold(0.0, f64::max);
        let norm = y.iter().cloned().fold(0.0, f64::max);
        x = y.iter().map(|v| v / norm).collect();
        if hi - lo < 1e-12 {
            break;
        }
    }
    assert!(hi - lo < 1e-10, "power iteration stalled: [{lo}, {hi}]");
    (lo + hi) / 2.0 - 1.0
}

fn gap_set() -> impl Strategy<Value = EventuallyPeriodicSet> {
    (
        0u64..8,
        1u64..5,
        prop::collection::vec(any::<bool>(), 8),
        prop::collection::vec(any::<bool>(), 4),
        any::<bool>(),
    )
        .prop_filter_map("empty", |(t, d, exc, res, finite)| {
            let exc: std::collections::BTreeSet<u64> =
                (0..t).filter(|&i| exc[i as usize]).collect();
            if finite {
                let s = EventuallyPeriodicSet::finite(exc);
                return (!s.is_empty()).then_some(s);
            }
            let res: std::collections::BTreeSet<u64> =
                (0..d).filter(|&i| res[i as usize]).collect();
            if res.is_empty() {
                return None;
            }
            EventuallyPeriodicSet::new(t, exc, d, res).ok()
        })
}

#[test]
fn known_values() {
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    assert!(
        (GapShift::new(EventuallyPeriodicSet::at_least(1))
            .unwrap()
            .entropy(DEFAULT_TOL)
            .unwrap()
            - golden)
            .abs()
            < 1e-12
    );
    assert!(
        (GapShift::new(EventuallyPeriodicSet::at_least(0))
            .unwrap()
            .entropy(DEFAULT_TOL)
            .unwrap()
            - 2.0)
            .abs()
            < 1e-12
    );
    assert!(
        GapShift::new(EventuallyPeriodicSet::finite([4]))
            .unwrap()
            .topological_entropy(DEFAULT_TOL)
            .unwrap()
            .abs()
            < 1e-12
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn root_matches_the_presentation(s in gap_set()) {
        let y = GapShift::new(s.clone()).unwrap();
        let lambda = y.entropy(DEFAULT_TOL).unwrap();
        let oracle = perron_of_presentation(&s);
        prop_assert!((lambda - oracle).abs() < 1e-8, "{}: {} vs {}", s, lambda, oracle);
    }
}
