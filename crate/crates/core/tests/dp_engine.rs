mod common;

use common::rng;
use proptest::prelude::*;
use sdc_core::dp::{
    empirical_dp_check, global_sensitivity, individual_dp_sensitivity, laplace_mechanism, metric_dp_mechanism,
    rdp_to_dp, sample_laplace, zcdp_to_dp, BudgetLedger, BudgetStatus, LedgerEntry, NeighborModel, Query,
    DEFAULT_BINS,
};
use sdc_core::rng::SdcRng;
use sdc_core::{AttributeSchema, MicrodataTable, Result, Role, Value};

fn table(xs: &[f64]) -> MicrodataTable {
    MicrodataTable::new(
        vec![AttributeSchema::numeric("v", Role::Confidential, -5.0, 20.0)],
        xs.iter().map(|&x| vec![Value::Num(x)]).collect(),
    )
    .unwrap()
}

fn queries(n: usize) -> Vec<Query> {
    vec![
        Query::count(),
        Query::Sum { attribute: "v".into() },
        Query::Mean { attribute: "v".into(), n },
        Query::Max { attribute: "v".into() },
        Query::Identity { row: 0, attribute: "v".into() },
    ]
}

proptest! {
    #[test]
    fn individual_never_exceeds_global(xs in prop::collection::vec(-5.0f64..=20.0, 1..20)) {
        let t = table(&xs);
        for q in queries(xs.len()) {
            for model in [NeighborModel::AddRemove, NeighborModel::Replace] {
                let local = individual_dp_sensitivity(&q, &t, model).unwrap();
                let global = global_sensitivity(&q, t.schema(), model).unwrap();
                prop_assert!(local >= 0.0 && local <= global + 1e-12, "{q:?} {model}: {local} > {global}");
            }
        }
    }

    #[test]
    fn ledger_total_is_monotone(eps in prop::collection::vec(0.0f64..3.0, 1..30), groups in prop::collection::vec(0u8..3, 30)) {
        let mut ledger = BudgetLedger::new();
        let mut last = 0.0;
        for (i, &e) in eps.iter().enumerate() {
            let mut entry = LedgerEntry::dp("m", e, 0.0);
            if groups[i] > 0 {
                entry = entry.disjoint(&format!("g{}", groups[i]));
            }
            let total = ledger.compose(entry).unwrap().epsilon;
            prop_assert!(total >= last - 1e-12);
            prop_assert!(total <= eps[..=i].iter().sum::<f64>() + 1e-9);
            last = total;
        }
        let text = ledger.to_jsonl().unwrap();
        prop_assert_eq!(BudgetLedger::from_jsonl(&text).unwrap(), ledger);
    }

    #[test]
    fn conversions_are_monotone(alpha in 1.01f64..64.0, eps in 0.0f64..10.0, rho in 0.001f64..5.0, delta in 1e-12f64..0.5) {
        let base = rdp_to_dp(alpha, eps, delta).unwrap();
        prop_assert!(rdp_to_dp(alpha, eps + 0.1, delta).unwrap() > base);
        prop_assert!(rdp_to_dp(alpha + 0.5, eps, delta).unwrap() < base);
        prop_assert!(rdp_to_dp(alpha, eps, delta * 0.5).unwrap() > base);
        let z = zcdp_to_dp(rho, delta).unwrap();
        prop_assert!(zcdp_to_dp(rho * 1.1, delta).unwrap() > z);
        prop_assert!(zcdp_to_dp(rho, delta * 0.5).unwrap() > z);
    }
}

#[test]
fn conversion_reference_values() {
    assert!((rdp_to_dp(2.0, 1.0, 1e-6).unwrap() - (1.0 + 1e6f64.ln())).abs() < 1e-9);
    // 0.1 + 2 sqrt(0.1 * ln 1e6)
    assert!((zcdp_to_dp(0.1, 1e-6).unwrap() - 2.450_806).abs() < 1e-4);
    assert!(rdp_to_dp(1.0, 1.0, 1e-6).is_err());
    assert!(zcdp_to_dp(0.0, 1e-6).is_err());
}

#[test]
fn ledger_reference_values() {
    let mut l = BudgetLedger::new();
    l.compose(LedgerEntry::dp("a", 0.5, 0.0)).unwrap();
    assert_eq!(l.compose(LedgerEntry::dp("b", 0.5, 0.0)).unwrap().epsilon, 1.0);
    let mut d = BudgetLedger::new();
    d.compose(LedgerEntry::dp("a", 0.3, 0.0).disjoint("x")).unwrap();
    assert_eq!(d.compose(LedgerEntry::dp("b", 0.7, 0.0).disjoint("x")).unwrap().epsilon, 0.7);
    let mut many = BudgetLedger::new();
    let mut last = None;
    for _ in 0..100 {
        last = Some(many.compose(LedgerEntry::dp("q", 0.5, 0.0)).unwrap());
    }
    let last = last.unwrap();
    assert!((last.epsilon - 50.0).abs() < 1e-9);
    assert_eq!(last.status, BudgetStatus::MostlyVoid);
    assert!(last.warning.unwrap().contains("mostly void"));
}

#[test]
fn laplace_moments() {
    let mut r = rng(1);
    let n = 200_000;
    let xs: Vec<f64> = (0..n).map(|_| sample_laplace(&mut r, 2.0)).collect();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
    // Laplace(b): mean 0, variance 2 b^2 = 8
    assert!(mean.abs() < 0.03, "{mean}");
    assert!((var - 8.0).abs() < 0.15, "{var}");
    let median_abs = {
        let mut a: Vec<f64> = xs.iter().map(|x| x.abs()).collect();
        a.sort_by(f64::total_cmp);
        a[n / 2]
    };
    // |X| is exponential with median b ln 2
    assert!((median_abs - 2.0 * 2f64.ln()).abs() < 0.02, "{median_abs}");
}

#[test]
fn laplace_count_passes_and_half_scale_fails() {
    let big = table(&[1.0, 2.0, 3.0, 4.0]);
    let small = table(&[1.0, 2.0, 3.0]);
    let honest = |t: &MicrodataTable, r: &mut SdcRng| -> Result<f64> { laplace_mechanism(t.n_rows() as f64, 1.0, 1.0, r) };
    let broken = |t: &MicrodataTable, r: &mut SdcRng| -> Result<f64> { laplace_mechanism(t.n_rows() as f64, 0.5, 1.0, r) };
    let ok = empirical_dp_check(&honest, &big, &small, NeighborModel::AddRemove, 1.0, DEFAULT_BINS, 100_000, 3).unwrap();
    assert!(ok.pass, "{ok:?}");
    let bad = empirical_dp_check(&broken, &big, &small, NeighborModel::AddRemove, 1.0, DEFAULT_BINS, 100_000, 3).unwrap();
    assert!(!bad.pass, "{bad:?}");
    assert!(empirical_dp_check(&honest, &big, &big, NeighborModel::AddRemove, 1.0, DEFAULT_BINS, 10, 3).is_err());
}

#[test]
fn planar_laplace_radius_has_gamma_mean() {
    let mut r = rng(4);
    let eps = 0.5;
    let n = 100_000;
    let mean_r = (0..n)
        .map(|_| {
            let p = metric_dp_mechanism(&[3.0, -1.0], eps, &mut r).unwrap();
            ((p[0] - 3.0).powi(2) + (p[1] + 1.0).powi(2)).sqrt()
        })
        .sum::<f64>()
        / n as f64;
    // Gamma(2, 1/eps) has mean 2/eps
    assert!((mean_r - 4.0).abs() < 0.05, "{mean_r}");
}
