mod common;

use chrono::NaiveDate;
use nalgebra::SymmetricEigen;
use proptest::prelude::*;

use mpesg::data::{generate_panel, generate_surprises, DgpConfig};
use mpesg::econometrics::{
    default_break_date, fit_specification, run_specification, winsorize, Factor, Field, FixedEffects, PanelDataset,
    SpecName, Term,
};
use mpesg::equilibrium::{clear_market, optimal_demand, FirmProfile, Investor, ModelParams, Shock};
use mpesg::surprise::{compute_raw, extract_surprises, EventQuoteSet, PcaOptions, LATE_MONTH_THRESHOLD};

fn params() -> impl Strategy<Value = ModelParams> {
    (
        50.0..200.0f64,
        0.0..0.05f64,
        0.005..0.1f64,
        0.0..=1.0f64,
        0.0..0.05f64,
        0.5..5.0f64,
        0.05..0.5f64,
        -0.01..0.08f64,
        0.0..1.0f64,
    )
        .prop_map(|(a, kappa, spread, mu, alpha, lambda, sigma_d, r_f, psi)| ModelParams {
            a,
            kappa,
            gamma: kappa + spread,
            mu,
            alpha,
            lambda,
            sigma_d,
            r_f,
            psi,
        })
}

fn quote_set() -> impl Strategy<Value = EventQuoteSet> {
    (
        28u32..=31,
        1u32..=31,
        28u32..=31,
        1u32..=31,
        0.5..5.0f64,
        prop::array::uniform3(-0.3..0.3f64),
    )
        .prop_map(|(dm, d, dm2, d2, level, moves)| EventQuoteSet {
            event_id: "p".into(),
            announce_date: NaiveDate::from_ymd_opt(2012, 3, 1).unwrap(),
            day: d.min(dm),
            days_in_month: dm,
            second_day: d2.min(dm2),
            second_days_in_month: dm2,
            ff1_pre: Some(level),
            ff1_post: Some(level + moves[0]),
            ff1_next_pre: Some(level),
            ff1_next_post: Some(level + moves[1]),
            ff2_pre: Some(level),
            ff2_post: Some(level + moves[2]),
            d2y: Some(0.0),
            d5y: Some(0.0),
            d10y: Some(0.0),
        })
}

fn max_coef_gap(a: &mpesg::econometrics::FitResult, b: &mpesg::econometrics::FitResult) -> f64 {
    a.estimates
        .iter()
        .zip(&b.estimates)
        .map(|(x, y)| (x.coef.unwrap() - y.coef.unwrap()).abs())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn second_meeting_reconstruction(q in quote_set()) {
        let raw = compute_raw(&q, LATE_MONTH_THRESHOLD).unwrap();
        let observed = 100.0 * (q.ff2_post.unwrap() - q.ff2_pre.unwrap());
        if q.second_days_in_month - q.second_day >= LATE_MONTH_THRESHOLD {
            let (d2, dm2) = (q.second_day as f64, q.second_days_in_month as f64);
            prop_assert!((d2 / dm2 * raw.mp1 + (dm2 - d2) / dm2 * raw.mp2 - observed).abs() < 1e-9);
        } else {
            prop_assert!(raw.mp2_used_next_month_contract);
            prop_assert!((raw.mp2 - observed).abs() < 1e-12);
        }
    }

    #[test]
    fn unchanged_quotes_give_zero_mp1(mut q in quote_set()) {
        q.ff1_post = q.ff1_pre;
        q.ff1_next_post = q.ff1_next_pre;
        prop_assert_eq!(compute_raw(&q, LATE_MONTH_THRESHOLD).unwrap().mp1, 0.0);
    }

    #[test]
    fn rotation_invariants(seed in 0u64..1000, n in 20usize..120) {
        let mut r = common::rng(seed);
        let quotes: Vec<EventQuoteSet> = (0..n)
            .map(|i| {
                let level = 2.0;
                EventQuoteSet {
                    event_id: format!("e{i}"),
                    announce_date: NaiveDate::from_ymd_opt(2000, 1, 10).unwrap() + chrono::Duration::days(40 * i as i64),
                    day: 10,
                    days_in_month: 31,
                    second_day: 12,
                    second_days_in_month: 30,
                    ff1_pre: Some(level),
                    ff1_post: Some(level + 0.05 * common::normal(&mut r)),
                    ff1_next_pre: Some(level),
                    ff1_next_post: Some(level),
                    ff2_pre: Some(level),
                    ff2_post: Some(level + 0.05 * common::normal(&mut r)),
                    d2y: Some(0.05 * common::normal(&mut r)),
                    d5y: Some(0.05 * common::normal(&mut r)),
                    d10y: Some(0.05 * common::normal(&mut r)),
                }
            })
            .collect();
        let ex = extract_surprises(&quotes, LATE_MONTH_THRESHOLD, PcaOptions::default()).unwrap();
        let shares: f64 = ex.decomposition.variance_shares.iter().sum();
        prop_assert!((shares - 1.0).abs() < 1e-12);
        prop_assert!(ex.decomposition.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(common::corr(&ex.surprises.ts, &ex.surprises.ps).abs() < 1e-10);
        prop_assert!(ex.surprises.loadings[0].path.abs() < 1e-10);
        prop_assert!((ex.surprises.loadings[0].target - 1.0).abs() < 1e-10);
        prop_assert!(ex.surprises.loadings[4].path >= 0.0);
    }

    #[test]
    fn market_clears(p in params(), theta in 0.0..=1.0f64) {
        let eq = clear_market(&p, FirmProfile::new(theta).unwrap(), Shock::default()).unwrap();
        prop_assert!((eq.aggregate_demand(p.mu) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn esg_demand_premium(p in params(), theta in 0.0..=1.0f64, price in 50.0..150.0f64) {
        let f = FirmProfile::new(theta).unwrap();
        let gap = optimal_demand(&p, f, price, Investor::Esg) - optimal_demand(&p, f, price, Investor::Traditional);
        let expected = p.alpha * theta / (p.lambda * p.sigma_d * p.sigma_d);
        prop_assert!((gap - expected).abs() <= 1e-9 * expected.abs().max(1.0));
    }

    #[test]
    fn within_matches_dummy_variables(seed in 0u64..10_000, firms in 6usize..10, events in 4usize..8, two_way in any::<bool>()) {
        let fe = if two_way { FixedEffects::FirmAndIndustryEvent } else { FixedEffects::Firm };
        let data = common::random_panel(seed, firms, events, 2);
        let spec = common::oracle_spec(fe);
        let fit = fit_specification(&spec, &data).unwrap();
        let oracle = common::dummy_variable_estimates(&spec, &data);
        for (e, b) in fit.estimates.iter().zip(&oracle) {
            prop_assert!((e.coef.unwrap() - b).abs() < 1e-8, "{} vs {}", e.coef.unwrap(), b);
        }
    }

    #[test]
    fn row_permutation_invariance(seed in 0u64..10_000, shuffle in any::<u64>()) {
        use rand::seq::SliceRandom;
        let data = common::random_panel(seed, 6, 5, 2);
        let mut rows = data.records().to_vec();
        rows.shuffle(&mut common::rng(shuffle));
        let permuted = PanelDataset::new(rows).unwrap();
        let spec = common::oracle_spec(FixedEffects::Firm);
        let (a, b) = (fit_specification(&spec, &data).unwrap(), fit_specification(&spec, &permuted).unwrap());
        prop_assert!(max_coef_gap(&a, &b) < 1e-12);
    }

    #[test]
    fn clustered_covariance_is_psd(seed in 0u64..10_000) {
        let data = common::random_panel(seed, 7, 6, 2);
        let fit = fit_specification(&common::oracle_spec(FixedEffects::Firm), &data).unwrap();
        let v = &fit.covariance;
        prop_assert!((v - v.transpose()).abs().max() < 1e-14);
        let eig = SymmetricEigen::new(v.clone()).eigenvalues;
        let scale = eig.abs().max();
        prop_assert!(eig.iter().all(|&l| l >= -1e-12 * scale));
        prop_assert!(fit.estimates.iter().all(|e| e.se.unwrap() > 0.0));
    }

    #[test]
    fn interaction_columns_are_products(seed in 0u64..10_000, row in 0usize..30) {
        let data = common::random_panel(seed, 5, 6, 2);
        let r = &data.records()[row];
        let date = default_break_date();
        let term: Term = "post_x_ts_x_esg".parse().unwrap();
        let product = [Factor::Post, Factor::Target, Factor::Esg]
            .iter()
            .map(|f| f.value(r, date).unwrap())
            .product::<f64>();
        prop_assert_eq!(term.value(r, date).unwrap(), product);
    }

    #[test]
    fn missing_esg_leaves_baseline_unchanged(seed in 0u64..10_000, row in 0usize..30) {
        let data = common::random_panel(seed, 5, 6, 2);
        let mut rows = data.records().to_vec();
        rows[row].esg_std = None;
        let dropped = PanelDataset::new(rows).unwrap();
        let (a, b) = (
            run_specification(SpecName::Baseline, &data).unwrap(),
            run_specification(SpecName::Baseline, &dropped).unwrap(),
        );
        prop_assert_eq!(a.n, b.n);
        prop_assert!(max_coef_gap(&a, &b) == 0.0);
        let esg = run_specification(SpecName::EsgOnly, &dropped).unwrap();
        prop_assert_eq!(esg.n + 1, a.n);
    }

    #[test]
    fn winsorizing_twice_changes_nothing(seed in 0u64..10_000) {
        let mut data = common::random_panel(seed, 10, 12, 3);
        winsorize(&mut data, Field::Size, 0.01, 0.99).unwrap();
        let once: Vec<_> = data.records().iter().map(|r| r.size).collect();
        winsorize(&mut data, Field::Size, 0.01, 0.99).unwrap();
        let twice: Vec<_> = data.records().iter().map(|r| r.size).collect();
        prop_assert_eq!(once, twice);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn generator_is_seed_deterministic(seed in any::<u64>()) {
        let cfg = DgpConfig { n_firms: 20, n_events: 12, seed, ..DgpConfig::default() };
        let (a, b) = (generate_panel(&cfg).unwrap(), generate_panel(&cfg).unwrap());
        prop_assert_eq!(a.records(), b.records());
    }

    #[test]
    fn generated_surprises_are_centered_and_orthogonal(seed in any::<u64>(), n_events in 10usize..200) {
        let cfg = DgpConfig { n_events, seed, ..DgpConfig::default() };
        let s = generate_surprises(&cfg).unwrap();
        let ts: Vec<f64> = s.iter().map(|e| e.ts_bp).collect();
        let ps: Vec<f64> = s.iter().map(|e| e.ps_bp).collect();
        prop_assert!(ts.iter().sum::<f64>().abs() < 1e-9);
        prop_assert!(ps.iter().sum::<f64>().abs() < 1e-9);
        prop_assert!(common::corr(&ts, &ps).abs() < 1e-10);
    }
}
