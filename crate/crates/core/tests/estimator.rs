use num_bigint::BigUint;
use proptest::prelude::*;
use spooky_core::estimator::Strategy as Plan;
use spooky_core::estimator::*;
use spooky_core::report::{render_costs, render_fib, Format, COST_COLUMNS};

/// `(n, beta, d, m, log D)` for the eight pebbling configurations at `w = 2`.
const PARAMS: [(u32, u32, u32, u32, u32); 8] = [
    (2048, 60, 90, 203, 59),
    (2048, 120, 90, 242, 56),
    (2048, 160, 94, 242, 54),
    (2048, 200, 94, 255, 53),
    (4096, 60, 162, 314, 72),
    (4096, 120, 166, 371, 67),
    (4096, 160, 166, 388, 65),
    (4096, 200, 162, 401, 64),
];

/// `(n, beta, r, s, d, m, log D, K, depth, total, qubits/n)`.
const FIB: [(u32, u32, u32, u32, u32, u32, u32, u32, u64, u64, f64); 16] = [
    (2048, 60, 1, 1, 165, 227, 52, 75, 900, 1800, 14.0),
    (2048, 60, 4, 2, 74, 210, 63, 31, 620, 1240, 13.3),
    (2048, 120, 1, 1, 177, 260, 48, 69, 828, 1656, 13.9),
    (2048, 120, 4, 2, 75, 228, 60, 29, 580, 1160, 13.1),
    (2048, 160, 1, 1, 189, 277, 46, 66, 792, 1584, 14.0),
    (2048, 160, 4, 2, 74, 253, 59, 29, 580, 1160, 13.1),
    (2048, 200, 1, 1, 222, 303, 44, 64, 768, 1536, 14.9),
    (2048, 200, 4, 2, 74, 278, 58, 28, 560, 1120, 13.0),
    (4096, 60, 1, 1, 290, 333, 66, 95, 1140, 2280, 14.7),
    (4096, 60, 4, 2, 129, 315, 77, 37, 740, 1480, 13.4),
    (4096, 120, 1, 1, 317, 381, 60, 87, 1044, 2088, 14.7),
    (4096, 120, 4, 2, 128, 363, 73, 35, 700, 1400, 13.2),
    (4096, 160, 1, 1, 358, 411, 57, 82, 984, 1968, 15.1),
    (4096, 160, 4, 2, 129, 367, 71, 34, 680, 1360, 13.2),
    (4096, 200, 1, 1, 354, 434, 55, 79, 948, 1896, 14.8),
    (4096, 200, 4, 2, 131, 427, 69, 34, 680, 1360, 13.2),
];

fn delta(beta: u32) -> RootHermite {
    RootHermite::for_beta(beta).unwrap()
}

/// Independent `d_max`: sums of `log2 p` in floating point, refusing close calls.
fn d_max_oracle(n: u32, exponent: u32) -> u32 {
    let mut sum = 0.0f64;
    let mut d = 0;
    let mut p = 1u64;
    loop {
        p += 1;
        if (2..p).take_while(|q| q * q <= p).any(|q| p % q == 0) {
            continue;
        }
        sum += exponent as f64 * (p as f64).log2();
        assert!((sum - n as f64).abs() > 1e-9, "oracle too close to call");
        if sum > n as f64 {
            return d;
        }
        d += 1;
    }
}

#[test]
fn root_hermite_digits() {
    assert_eq!(delta(60).as_str(), "1.01145310214785");
    assert_eq!(delta(120).as_str(), "1.00843474281592");
    assert_eq!(delta(160).as_str(), "1.00718344897388");
    assert_eq!(delta(200).as_str(), "1.00628260691082");
    assert_eq!(RootHermite::for_beta(99), Err(EstimateError::UnknownBeta(99)));
}

#[test]
fn log_d_bound_examples() {
    assert_eq!(log_d_bound(2048, 222, 303, &delta(200), true), 44);
    assert_eq!(log_d_bound(2048, 222, 303, &delta(200), false), 26);
    assert_eq!(log_d_bound(2048, 94, 242, &delta(160), true), 54);
    for &(n, beta, d, m, log_d) in &PARAMS {
        assert_eq!(log_d_bound(n, d, m, &delta(beta), true), log_d);
        assert_eq!(log_d_bound_exact(n, d, m, &delta(beta), true), log_d);
    }
}

#[test]
fn guard_path_on_exact_integers() {
    // no delta term to speak of: the bound lands on an integer and must step past it
    let tiny = RootHermite::parse("1.000000000000000000001").unwrap();
    let v = log_d_rhs(64, 8, 8, &tiny, false);
    assert!((v - 16.0).abs() < 1e-9);
    assert_eq!(log_d_bound(64, 8, 8, &tiny, false), 17);
    assert_eq!(log_d_bound_exact(64, 8, 8, &tiny, false), 17);
}

#[test]
fn d_max_examples() {
    assert_eq!(d_max(11, 2), 2);
    assert_eq!(d_max(4, 1), 2);
    assert_eq!(d_max(2048, 2), 94);
    assert_eq!(d_max(2048, 2), d_max_oracle(2048, 3));
    assert_eq!(d_max(4096, 2), d_max_oracle(4096, 3));
    assert_eq!(d_max_with_exponent(2048, 4), d_max_oracle(2048, 4));
    // d_max is exact: the next prime overshoots
    let primes: Vec<u64> =
        (2u64..).filter(|&c| (2..c).take_while(|p| p * p <= c).all(|p| c % p != 0)).take(95).collect();
    let prod = |d: usize| primes[..d].iter().fold(BigUint::from(1u32), |a, &p| a * BigUint::from(p).pow(3));
    assert!(prod(94) <= BigUint::from(1u32) << 2048usize);
    assert!(prod(95) > BigUint::from(1u32) << 2048usize);
}

#[test]
fn select_params_reproduces_tables() {
    for &(n, beta, d, m, log_d) in &PARAMS {
        let p = select_params(n, beta, 2).unwrap();
        assert_eq!((p.d, p.m, p.log_d), (d, m, log_d), "n={n} beta={beta}");
    }
    assert_eq!(select_params(2048, 99, 2), Err(EstimateError::UnknownBeta(99)));
}

#[test]
fn game_lengths() {
    let lengths: Vec<usize> = PARAMS.iter().map(|p| game_length(p.4, 2)).collect();
    assert_eq!(lengths, vec![88, 82, 79, 79, 106, 100, 97, 94]);
    assert_eq!(game_length(1, 1), 1);
    assert_eq!(game_length(5, 1), 9);
}

#[test]
fn qubit_ratios_match_tables() {
    for &(n, beta, s, d, _, log_d, _, _) in &PEBBLING_TABLE {
        let listed = match (n, beta, s) {
            (2048, 60, 5) => 7.6,
            (2048, 60, 12) => 14.6,
            (2048, 120, 5) => 7.5,
            (2048, 120, 12) => 14.5,
            (2048, 160, 5) => 7.5,
            (2048, 160, 12) => 14.5,
            (2048, 200, 5) => 7.4,
            (2048, 200, 12) => 14.4,
            (4096, 60, 5) => 7.8,
            (4096, 60, 8) => 10.8,
            (4096, 120, 5) => 7.7,
            (4096, 120, 12) => 14.7,
            (4096, 160, 5) => 7.6,
            (4096, 160, 12) => 14.6,
            (4096, 200, 5) => 7.5,
            (4096, 200, 12) => 14.5,
            _ => unreachable!(),
        };
        let got = qubit_ratio(n, d, log_d, s);
        assert!((got - listed).abs() <= 0.1 + 1e-9, "{n}/{beta}/{s}: {got}");
    }
}

#[test]
fn fibonacci_rows() {
    for &(n, beta, r, s, d, _, log_d, k, depth, total, q) in &FIB {
        let (dd, tt, qq) = fibonacci_costs(n, d, r, s, k).unwrap();
        assert_eq!((dd, tt), (depth, total), "{n}/{beta}/({r},{s})");
        assert!((qq - q).abs() <= 0.1, "{n}/{beta}/({r},{s}): {qq}");
        let ours = fibonacci_estimate(n, beta, r, s).unwrap();
        assert_eq!((ours.d, ours.log_d), (d, log_d), "{n}/{beta}/({r},{s})");
        assert!(ours.k.abs_diff(k) <= 1, "{n}/{beta}/({r},{s}): K {} vs {k}", ours.k);
        assert!(fib_k(r, log_d).abs_diff(k) <= 1);
    }
}

#[test]
fn fibonacci_examples() {
    let a = fibonacci_estimate(2048, 160, 4, 2).unwrap();
    assert_eq!((a.k, a.depth, a.total_mults), (29, 580, 1160));
    assert!(a.qubit_ratio_lower >= 13.05 && a.qubit_ratio_lower < 13.15);
    // F_76 <= 2^52 < F_77, one more than the tabulated K = 75
    let b = fibonacci_estimate(2048, 60, 1, 1).unwrap();
    assert_eq!((b.d, b.m, b.log_d, b.k), (165, 227, 52, 76));
    assert_eq!(fibonacci_costs(2048, 165, 1, 1, 75).unwrap().0, 900);
    assert_eq!(fibonacci_costs(2048, 165, 1, 1, 75).unwrap().1, 1800);
    assert_eq!(g_sequence(1, 6)[5], BigUint::from(5u32));
    assert_eq!(g_sequence(2, 5), [0u32, 1, 2, 5, 12].map(BigUint::from).to_vec());
    assert_eq!(fibonacci_estimate(2048, 160, 4, 4), Err(EstimateError::UnsupportedS(4)));
    assert!(matches!(fibonacci_estimate(2048, 160, 3, 2), Err(EstimateError::InvalidInput(_))));
}

#[test]
fn sequential_cost_examples() {
    assert_eq!(sequential_costs(54).mult_depth, 216);
    assert_eq!(sequential_costs(1).mult_depth, 4);
    assert_eq!(sequential_costs(72).mult_depth, 288);
    let c = sequential_costs(64);
    assert!((c.space_qubits(100, 50.0) - 1.3 * 250.0 * 6.0).abs() < 1e-9);
    assert!(c.space_expression().contains("log(64)"));
}

#[test]
fn shor_table() {
    assert_eq!(shor_reference(2048, true, true), Ok(230));
    assert_eq!(shor_reference(4096, true, true), Ok(444));
    assert_eq!(shor_reference(2048, false, false), Ok(6018));
    assert_eq!(shor_reference(2048, false, true), Ok(2290));
    assert_eq!(shor_reference(4096, true, false), Ok(1218));
    assert_eq!(shor_reference(1024, true, true), Err(EstimateError::UnknownConfiguration));
}

#[test]
fn table_and_construction_strategies() {
    let t = estimate(&EstimatorParams::new(2048, 160, 2, 12), Plan::Table).unwrap();
    assert_eq!((t.d, t.m, t.log_d, t.depth, t.total_mults, t.length), (94, 242, 54, 157, 253, 79));
    assert_eq!(format!("{:.1}", t.qubit_ratio), "14.5");
    let c = estimate(&EstimatorParams::new(4096, 200, 2, 12), Plan::Construction).unwrap();
    assert_eq!((c.length, c.depth), (94, 187));
    assert!(c.pebbles_used.is_some());
    assert_eq!(
        estimate(&EstimatorParams::new(2048, 160, 2, 7), Plan::Table),
        Err(EstimateError::UnknownConfiguration)
    );
}

#[test]
fn estimate_depth_at_least_floor() {
    for &(n, beta, ..) in &PARAMS {
        let r = estimate(&EstimatorParams::new(n, beta, 2, 12), Plan::Construction).unwrap();
        assert!(r.depth >= 2 * r.length - 1);
        assert_eq!(r.depth, depth_floor(r.log_d, 2));
        assert!(r.d <= d_max(n, 2) && r.m >= r.d + 4);
    }
}

#[test]
fn report_formats() {
    let t = estimate(&EstimatorParams::new(2048, 160, 2, 12), Plan::Table).unwrap();
    let csv_text = render_costs(std::slice::from_ref(&t), Format::Csv);
    assert!(csv_text.contains("94,242,54,157,253,14.5"));
    let mut rd = csv::Reader::from_reader(csv_text.as_bytes());
    assert_eq!(rd.headers().unwrap().iter().collect::<Vec<_>>(), COST_COLUMNS.to_vec());
    let rows: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 1);
    assert_eq!((5..11).map(|i| &rows[0][i]).collect::<Vec<_>>(), ["94", "242", "54", "157", "253", "14.5"]);

    let md = render_costs(&[t.clone()], Format::Markdown);
    assert_eq!(md.lines().count(), 3);
    let empty = render_costs(&[], Format::Markdown);
    assert_eq!(empty.lines().count(), 2);
    assert_eq!(render_costs(&[], Format::Csv).lines().count(), 1);

    let json: serde_json::Value = serde_json::from_str(&render_costs(&[t], Format::Json)).unwrap();
    assert_eq!(json[0]["total_mults"], 253);
    let fib = render_fib(&[fibonacci_estimate(2048, 160, 4, 2).unwrap()], Format::Csv);
    assert_eq!(fib.lines().count(), 2);
}

proptest! {
    #[test]
    fn float_path_agrees_with_exact(n in 64u32..8192, d in 1u32..400, extra in 4u32..1200, beta_i in 0usize..4, lower: bool) {
        let dl = delta(ROOT_HERMITE[beta_i].0);
        let m = d + extra;
        prop_assert_eq!(log_d_bound(n, d, m, &dl, lower), log_d_bound_exact(n, d, m, &dl, lower));
    }

    #[test]
    fn rhs_monotone_in_drivers(n in 64u32..8192, d in 1u32..400, extra in 4u32..1200, lower: bool) {
        let m = d + extra;
        let lo = delta(200);
        let hi = delta(60);
        prop_assert!(log_d_rhs(n, d, m, &hi, lower) > log_d_rhs(n, d, m, &lo, lower));
        prop_assert!(log_d_rhs(n + 1, d, m, &lo, lower) > log_d_rhs(n, d, m, &lo, lower));
        prop_assert!(log_d_bound(n + 1, d, m, &lo, lower) >= log_d_bound(n, d, m, &lo, lower));
        prop_assert!(log_d_bound(n, d, m, &hi, lower) >= log_d_bound(n, d, m, &lo, lower));
    }

    #[test]
    fn selected_params_admissible(n in 16u32..600, beta_i in 0usize..4, w in 1u32..4) {
        let beta = ROOT_HERMITE[beta_i].0;
        if d_max(n, w) >= 1 {
            let p = select_params(n, beta, w).unwrap();
            prop_assert!(p.d >= 1 && p.d <= d_max(n, w));
            prop_assert!(p.m >= p.d + 4 && p.m <= 8 * d_max(n, w));
            prop_assert_eq!(p.log_d, log_d_bound(n, p.d, p.m, &delta(beta), true));
        }
    }
}
