use macrots::dataset::{construct_variables, difference_table, parse_csv, DataTable, TimeSeries, BUNDLED_FIXTURE, RAW_SCHEMA};
use macrots::rng::Lcg64;
use macrots::varmod::{fevd, irf, select_lag, var_fit, var_stability, Ordering, VarModel};
use nalgebra::DMatrix;

const A: [[f64; 2]; 2] = [[0.5, 0.1], [0.0, 0.3]];

fn table(cols: Vec<Vec<f64>>) -> DataTable {
    DataTable::new(
        cols.into_iter()
            .enumerate()
            .map(|(i, v)| TimeSeries::new(format!("y{i}"), 1000, v, "").unwrap())
            .collect(),
    )
    .unwrap()
}

/// Bivariate VAR(1) with coefficient matrix `A`, innovations `L u` with
/// `L = [[1, 0], [0.5, 1]]`.
fn simulate(seed: u64, n: usize) -> DataTable {
    let mut g = Lcg64::new(seed);
    let (mut a, mut b) = (0.0, 0.0);
    let mut ya = Vec::with_capacity(n);
    let mut yb = Vec::with_capacity(n);
    for _ in 0..n + 100 {
        let (u1, u2) = (g.next_normal(), g.next_normal());
        let na = A[0][0] * a + A[0][1] * b + u1;
        let nb = A[1][0] * a + A[1][1] * b + 0.5 * u1 + u2;
        a = na;
        b = nb;
        ya.push(a);
        yb.push(b);
    }
    table(vec![ya[100..].to_vec(), yb[100..].to_vec()])
}

fn known_model(sigma: DMatrix<f64>) -> VarModel {
    let a = DMatrix::from_row_slice(2, 2, &[A[0][0], A[0][1], A[1][0], A[1][1]]);
    VarModel::from_parts(vec!["a".into(), "b".into()], &[0.0, 0.0], &[a], sigma).unwrap()
}

#[test]
fn var1_coefficients_recovered() {
    let m = var_fit(&simulate(11, 5000), 1).unwrap();
    assert_eq!(m.coefficients.shape(), (2, 3));
    for i in 0..2 {
        for j in 0..2 {
            let est = m.coefficients[(i, 1 + j)];
            assert!((est - A[i][j]).abs() < 0.05, "A[{i}][{j}] = {est}");
        }
    }
    let s = &m.sigma_ml;
    assert!((s[(0, 1)] - s[(1, 0)]).abs() < 1e-12);
    assert!(s[(0, 0)] > 0.0 && s[(0, 0)] * s[(1, 1)] - s[(0, 1)] * s[(1, 0)] > 0.0);
}

#[test]
fn lag_selection_finds_true_order() {
    let sel = select_lag(&simulate(12, 1000), 4).unwrap();
    assert_eq!((sel.starred.aic, sel.starred.sc, sel.starred.hq), (1, 1, 1));
    assert_eq!(sel.rows.len(), 5);
    assert!(sel.rows[0].lr.is_none());
}

#[test]
fn criterion_identities_hold_on_every_row() {
    let sel = select_lag(&simulate(13, 120), 6).unwrap();
    let t = sel.effective_t as f64;
    let k = sel.n_vars;
    for r in &sel.rows {
        assert_eq!(r.n_params, k * (k * r.lag + 1));
        let n = r.n_params as f64;
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
        assert!(rel(r.aic * t, -2.0 * r.logl + 2.0 * n) < 1e-9);
        assert!(rel(r.sc * t, -2.0 * r.logl + n * t.ln()) < 1e-9);
        assert!(rel(r.hq * t, -2.0 * r.logl + 2.0 * n * t.ln().ln()) < 1e-9);
    }
}

#[test]
fn published_rows_imply_31_observations() {
    // (lag, LogL, AIC) for the first two rows of the published lag table.
    let k = 3.0;
    for (lag, logl, aic) in [(0.0f64, 215.0084f64, -13.67796), (1.0, 233.5033, -14.29054)] {
        let n = k * (k * lag + 1.0);
        let t: f64 = (-2.0 * logl + 2.0 * n) / aic;
        assert!((t - 31.0).abs() < 1e-3, "lag {lag}: T = {t}");
    }
}

#[test]
fn stability_examples() {
    let moduli = var_stability(&known_model(DMatrix::identity(2, 2)));
    assert!((moduli[0] - 0.5).abs() < 1e-12 && (moduli[1] - 0.3).abs() < 1e-12);
    let walk = VarModel::from_parts(vec!["y".into()], &[0.0], &[DMatrix::from_element(1, 1, 1.0)], DMatrix::identity(1, 1)).unwrap();
    assert!((var_stability(&walk)[0] - 1.0).abs() < 1e-12);
}

#[test]
fn univariate_irf_decays_geometrically() {
    let m = VarModel::from_parts(vec!["y".into()], &[0.0], &[DMatrix::from_element(1, 1, 0.5)], DMatrix::from_element(1, 1, 4.0)).unwrap();
    let r = irf(&m, 20, &Ordering::identity(1)).unwrap();
    for h in 0..=20 {
        assert!((r.responses[h][(0, 0)] - 2.0 * 0.5f64.powi(h as i32)).abs() < 1e-10);
    }
}

#[test]
fn irf_matches_simulation_oracle() {
    // With unit-variance structural shocks u_0, E[y_h u_0j] is the response of
    // y_h to shock j. Each replication draws u_0..u_h and runs the recursion.
    let sigma = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.25]);
    let r = irf(&known_model(sigma), 5, &Ordering::identity(2)).unwrap();
    let reps = 100_000;
    let mut g = Lcg64::new(99);
    let mut sum = [[[0.0f64; 2]; 2]; 6];
    let mut sum_sq = [[[0.0f64; 2]; 2]; 6];
    for _ in 0..reps {
        let (mut a, mut b) = (0.0, 0.0);
        let mut u0 = [0.0; 2];
        for h in 0..6 {
            let (u1, u2) = (g.next_normal(), g.next_normal());
            if h == 0 {
                u0 = [u1, u2];
            }
            let na = A[0][0] * a + A[0][1] * b + u1;
            let nb = A[1][0] * a + A[1][1] * b + 0.5 * u1 + u2;
            a = na;
            b = nb;
            for (i, y) in [a, b].into_iter().enumerate() {
                for j in 0..2 {
                    let v = y * u0[j];
                    sum[h][i][j] += v;
                    sum_sq[h][i][j] += v * v;
                }
            }
        }
    }
    let n = reps as f64;
    for h in 0..6 {
        for i in 0..2 {
            for j in 0..2 {
                let mean = sum[h][i][j] / n;
                let se = ((sum_sq[h][i][j] / n - mean * mean) / n).sqrt();
                let exact = r.responses[h][(i, j)];
                assert!((mean - exact).abs() <= 3.0 * se.max(1e-12), "h={h} ({i},{j}): {mean} vs {exact} (se {se})");
            }
        }
    }
}

#[test]
fn impact_matrix_is_lower_cholesky() {
    let m = var_fit(&simulate(14, 300), 2).unwrap();
    let r = irf(&m, 0, &Ordering::identity(2)).unwrap();
    let p = &r.responses[0];
    assert_eq!(p[(0, 1)], 0.0);
    let back = p * p.transpose();
    assert!((back - &m.sigma_df).abs().max() < 1e-12);
}

#[test]
fn fevd_rows_sum_to_one_and_first_variable_owns_impact() {
    let m = var_fit(&simulate(15, 300), 2).unwrap();
    for ord in [Ordering::identity(2), Ordering::new(vec![1, 0], 2).unwrap()] {
        let f = fevd(&m, 12, &ord).unwrap();
        for s in &f.shares {
            for i in 0..2 {
                assert!((s.row(i).sum() - 1.0).abs() < 1e-10);
                assert!(s.row(i).iter().all(|v| (0.0..=1.0).contains(v)));
            }
        }
        let first = ord.as_slice()[0];
        assert!((f.shares[0][(first, first)] - 1.0).abs() < 1e-12);
    }
}

#[test]
fn diagonal_sigma_makes_fevd_ordering_free() {
    let m = known_model(DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.5]));
    let a = fevd(&m, 10, &Ordering::identity(2)).unwrap();
    let b = fevd(&m, 10, &Ordering::new(vec![1, 0], 2).unwrap()).unwrap();
    for (x, y) in a.shares.iter().zip(&b.shares) {
        assert!((x - y).abs().max() < 1e-12);
    }
}

#[test]
fn rescaling_a_variable_rescales_its_responses_only() {
    let data = simulate(16, 400);
    let c = 37.5;
    let cols = data.columns();
    let scaled = table(vec![cols[0].values.iter().map(|v| c * v).collect(), cols[1].values.clone()]);
    let m1 = var_fit(&data, 2).unwrap();
    let m2 = var_fit(&scaled, 2).unwrap();
    let ord = Ordering::identity(2);
    let (r1, r2) = (irf(&m1, 10, &ord).unwrap(), irf(&m2, 10, &ord).unwrap());
    for (x, y) in r1.responses.iter().zip(&r2.responses) {
        for j in 0..2 {
            assert!((y[(0, j)] - c * x[(0, j)]).abs() < 1e-9 * (c * x[(0, j)]).abs().max(1.0));
            assert!((y[(1, j)] - x[(1, j)]).abs() < 1e-9 * x[(1, j)].abs().max(1.0));
        }
    }
    let (f1, f2) = (fevd(&m1, 10, &ord).unwrap(), fevd(&m2, 10, &ord).unwrap());
    for (x, y) in f1.shares.iter().zip(&f2.shares) {
        assert!((x - y).abs().max() < 1e-9);
    }
}

fn fixture_differences() -> DataTable {
    let raw = parse_csv(BUNDLED_FIXTURE, &RAW_SCHEMA).unwrap();
    let vars = construct_variables(&raw, 1980).unwrap();
    difference_table(&vars.select(&["LGDP", "LURC", "LRRC"]).unwrap(), 1).unwrap()
}

#[test]
fn fixture_var8_shape() {
    let m = var_fit(&fixture_differences(), 8).unwrap();
    assert_eq!(m.coefficients.shape(), (3, 25));
    assert_eq!(m.effective_t, 31);
}

/// Urban consumption explains more of output's forecast variance than rural
/// consumption at every horizon beyond impact.
#[test]
fn fixture_fevd_urban_dominates_rural() {
    let m = var_fit(&fixture_differences(), 8).unwrap();
    let f = fevd(&m, 10, &Ordering::identity(3)).unwrap();
    let urban = f.shares_of(0, 1);
    let rural = f.shares_of(0, 2);
    eprintln!("urban {urban:.3?}\nrural {rural:.3?}");
    for h in 2..=10 {
        assert!(urban[h - 1] > rural[h - 1], "h={h}: {} vs {}", urban[h - 1], rural[h - 1]);
    }
}
