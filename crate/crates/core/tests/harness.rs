mod common;

use common::{nosolution_s, proper_s, q, rational_matrix, to_f64};
use exact_fa::classify::Pattern;
use exact_fa::harness::{
    blend, interpolate_study, monte_carlo, round_to_rational, sample_covariance, simulate_covariance, HarnessError, Mode,
    MonteCarloTable, Rounding, RunRow, SimulationModel, StudyConfig,
};
use exact_fa::Rational;

fn numeric(starts: usize) -> StudyConfig {
    StudyConfig { mode: Mode::Numeric, starts, ..StudyConfig::default() }
}

#[test]
fn zero_loadings_give_near_identity() {
    let mut m = SimulationModel::new(vec![vec![0.0]; 4]);
    m.n = 2000;
    let s = to_f64(&sample_covariance(&m, 0, None).unwrap());
    for i in 0..4 {
        for j in 0..4 {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((s[i][j] - want).abs() < 0.1, "{s:?}");
        }
    }
}

#[test]
fn sample_covariance_is_symmetric_positive_definite() {
    let m = SimulationModel::new(vec![vec![0.9], vec![0.8], vec![0.7]]);
    for run in 0..5 {
        let s = sample_covariance(&m, run, None).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(s[i][j], s[j][i]);
            }
        }
        let f = to_f64(&s);
        let e = exact_fa::classify::symmetric_eigen(&f);
        assert!(e.values.iter().all(|&v| v > 0.0));
    }
}

#[test]
fn simulation_is_deterministic() {
    let m = SimulationModel { seed: 9, ..SimulationModel::new(vec![vec![0.6], vec![0.7], vec![0.5]]) };
    assert_eq!(sample_covariance(&m, 4, None).unwrap(), sample_covariance(&m, 4, None).unwrap());
    assert_ne!(sample_covariance(&m, 4, None).unwrap(), sample_covariance(&m, 5, None).unwrap());
    let other = SimulationModel { seed: 10, ..m.clone() };
    assert_ne!(sample_covariance(&m, 4, None).unwrap(), sample_covariance(&other, 4, None).unwrap());
}

#[test]
fn exact_mode_rounds_to_one_decimal() {
    let m = SimulationModel::new(vec![vec![0.6], vec![0.7], vec![0.5]]);
    let prob = simulate_covariance(&m, 0).unwrap();
    let ten = Rational::from_integer(10.into());
    assert!(prob.s().iter().flatten().all(|x| (x * &ten).is_integer()));
    let exact = SimulationModel { rounding: Rounding::Exact, ..m };
    assert!(simulate_covariance(&exact, 0).unwrap().s().iter().flatten().any(|x| !(x * &ten).is_integer()));
    assert_eq!(round_to_rational(0.349, 2), q(35, 100));
}

#[test]
fn invalid_models_are_rejected() {
    let heavy = SimulationModel::new(vec![vec![1.1], vec![0.5], vec![0.5]]);
    assert!(matches!(sample_covariance(&heavy, 0, None), Err(HarnessError::Model(_))));
    let square = SimulationModel::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]);
    assert!(sample_covariance(&square, 0, None).is_err());
    let m = SimulationModel::new(vec![vec![0.5]; 3]);
    assert!(monte_carlo(&m, 0, &numeric(5)).is_err());
}

#[test]
fn single_run_table_and_csv_round_trip() {
    let m = SimulationModel::new(vec![vec![0.9], vec![0.8], vec![0.9]]);
    let t = monte_carlo(&m, 1, &numeric(10)).unwrap();
    assert_eq!(t.rows.len(), 1);
    let csv = t.to_csv().unwrap();
    let mut rdr = csv::Reader::from_reader(csv.as_bytes());
    let back: Vec<RunRow> = rdr.deserialize().collect::<Result<_, _>>().unwrap();
    assert_eq!(MonteCarloTable { rows: back }, t);
    assert_eq!(t.counts().values().sum::<usize>(), 1);
    assert!(t.counts_csv().unwrap().starts_with("pattern,count\n"));
}

#[test]
fn near_zero_unique_variance_gives_improper_runs() {
    let m = SimulationModel { psi: Some(vec![0.0001, 0.36, 0.51]), ..SimulationModel::new(vec![vec![0.99995], vec![0.8], vec![0.7]]) };
    let t = monte_carlo(&m, 20, &numeric(10)).unwrap();
    assert!(t.counts()[&Pattern::Improper] > 0, "{:?}", t.counts());
    let again = monte_carlo(&m, 20, &numeric(10)).unwrap();
    assert_eq!(t, again);
}

#[test]
fn blend_is_exact() {
    let (a, b) = (rational_matrix(&proper_s()), rational_matrix(&nosolution_s()));
    assert_eq!(blend(&a, &b, &q(1, 1)), a);
    assert_eq!(blend(&a, &b, &q(0, 1)), b);
    assert_eq!(blend(&a, &b, &q(1, 2))[0][1], q(61, 100));
}

#[test]
fn interpolation_grid_and_transition() {
    let (a, b) = (rational_matrix(&proper_s()), rational_matrix(&nosolution_s()));
    let cfg = StudyConfig { bisection_steps: 8, profile_points: 5, ..numeric(10) };
    let st = interpolate_study(&a, &b, 1, 11, &cfg).unwrap();
    assert_eq!(st.grid.len(), 11);
    assert!(st.grid.windows(2).all(|w| w[0].t < w[1].t));
    assert_eq!(st.grid[0].pattern, Pattern::NoSolution);
    assert_eq!(st.grid[10].pattern, Pattern::Proper);
    assert!(!st.transitions.is_empty());
    for tr in &st.transitions {
        assert!(tr.lower < tr.upper && tr.upper - tr.lower <= 0.1 / 256.0 + 1e-15);
    }
    assert_eq!(st.profile.len(), 11 * 5);
    assert!(interpolate_study(&a, &b, 1, 1, &cfg).is_err());
}
