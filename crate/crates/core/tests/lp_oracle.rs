use contract_synth::lp::{solve_lp, LinearProgram, LpBuilder, LpStatus};
use contract_synth::{Matrix, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Minimum of `c^T z` over all vertices of `{G z <= g}`.
fn brute_force(c: &Vector, g: &Matrix, h: &Vector) -> Option<f64> {
    let d = c.len();
    let mut best: Option<f64> = None;
    for rows in combinations(g.nrows(), d) {
        let sub = Matrix::from_fn(d, d, |i, j| g[(rows[i], j)]);
        let rhs = Vector::from_fn(d, |i, _| h[rows[i]]);
        if sub.clone().svd(false, false).singular_values.min() < 1e-9 {
            continue;
        }
        let Some(z) = sub.lu().solve(&rhs) else { continue };
        if (g * &z - h).max() <= 1e-9 {
            let v = c.dot(&z);
            best = Some(best.map_or(v, |b: f64| b.min(v)));
        }
    }
    best
}

fn random_bounded_program(rng: &mut ChaCha8Rng, d: usize) -> (Vector, Matrix, Vector) {
    let extra = rng.random_range(2..=6);
    let rows = 2 * d + extra;
    let center = Vector::from_fn(d, |_, _| rng.random_range(-1.0..1.0));
    let mut g = Matrix::zeros(rows, d);
    let mut h = Vector::zeros(rows);
    for i in 0..d {
        let bound = rng.random_range(1.0..4.0);
        g[(2 * i, i)] = 1.0;
        h[2 * i] = bound;
        g[(2 * i + 1, i)] = -1.0;
        h[2 * i + 1] = bound;
    }
    for r in 2 * d..rows {
        for j in 0..d {
            g[(r, j)] = rng.random_range(-2.0..2.0);
        }
        let slack = rng.random_range(0.0..1.5);
        h[r] = (g.row(r) * &center)[0] + slack;
    }
    let c = Vector::from_fn(d, |_, _| rng.random_range(-3.0..3.0));
    (c, g, h)
}

#[test]
fn simplex_matches_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..100 {
        let d = if case % 2 == 0 { 2 } else { 3 };
        let (c, g, h) = random_bounded_program(&mut rng, d);
        let expected = brute_force(&c, &g, &h).expect("program is feasible and bounded");
        let lp = LinearProgram::new(c.clone(), g.clone(), h.clone(), Matrix::zeros(0, d), Vector::zeros(0)).unwrap();
        let res = solve_lp(&lp);
        assert_eq!(res.status, LpStatus::Optimal, "case {case}");
        assert!(
            (res.objective_value - expected).abs() <= 1e-8,
            "case {case}: simplex {} vs vertices {expected}",
            res.objective_value
        );
        assert!(res.max_violation <= 1e-9);
    }
}

#[test]
fn equality_constrained_programs_match_substitution() {
    // z3 = 1 - z1 - z2 turns a 3-D program with one equality into a 2-D one.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..30 {
        let c = Vector::from_fn(3, |_, _| rng.random_range(-2.0..2.0));
        let mut b = LpBuilder::new(3);
        for (j, &cj) in c.iter().enumerate() {
            b.set_objective(j, cj);
        }
        for j in 0..3 {
            let mut row = [0.0; 3];
            row[j] = -1.0;
            b.add_le(&row, 0.0);
        }
        b.add_eq(&[1.0, 1.0, 1.0], 1.0);
        let res = solve_lp(&b.build().unwrap());
        // Over the simplex the optimum is the smallest cost coefficient.
        let expected = c.min();
        assert_eq!(res.status, LpStatus::Optimal);
        assert!((res.objective_value - expected).abs() <= 1e-10, "case {case}");
    }
}

#[test]
fn constructed_infeasible_cases() {
    // z <= -1 and z >= 1
    let lp = LinearProgram::feasibility(Matrix::from_row_slice(2, 1, &[1.0, -1.0]), Vector::from_vec(vec![-1.0, -1.0]))
        .unwrap();
    let res = solve_lp(&lp);
    assert_eq!(res.status, LpStatus::Infeasible);
    assert!(res.infeasibility > 1e-6);
    assert!(res.z_star.is_none());

    // x + y = 1, x + y = 2
    let mut b = LpBuilder::new(2);
    b.add_eq(&[1.0, 1.0], 1.0);
    b.add_eq(&[1.0, 1.0], 2.0);
    assert_eq!(solve_lp(&b.build().unwrap()).status, LpStatus::Infeasible);

    // Triangle x >= 0, y >= 0, x + y <= -0.5
    let mut b = LpBuilder::new(2);
    b.add_le(&[-1.0, 0.0], 0.0);
    b.add_le(&[0.0, -1.0], 0.0);
    b.add_le(&[1.0, 1.0], -0.5);
    assert_eq!(solve_lp(&b.build().unwrap()).status, LpStatus::Infeasible);
}

#[test]
fn constructed_unbounded_cases() {
    // min -x s.t. x >= 0
    let mut b = LpBuilder::new(1);
    b.set_objective(0, -1.0);
    b.add_le(&[-1.0], 0.0);
    assert_eq!(solve_lp(&b.build().unwrap()).status, LpStatus::Unbounded);

    // min x + y over a free direction x - y = 0 with no lower bound
    let mut b = LpBuilder::new(2);
    b.set_objective(0, 1.0);
    b.set_objective(1, 1.0);
    b.add_eq(&[1.0, -1.0], 0.0);
    assert_eq!(solve_lp(&b.build().unwrap()).status, LpStatus::Unbounded);

    // Zero objective over an unbounded set is optimal, not unbounded.
    let mut b = LpBuilder::new(2);
    b.add_le(&[-1.0, 0.0], 0.0);
    assert_eq!(solve_lp(&b.build().unwrap()).status, LpStatus::Optimal);
}

#[test]
fn degenerate_vertex_does_not_cycle() {
    // Many constraints through the origin.
    let mut b = LpBuilder::new(3);
    b.set_objective(0, -1.0);
    b.set_objective(1, -1.0);
    b.set_objective(2, -1.0);
    for k in 0..12 {
        let a = k as f64 * 0.5;
        b.add_le(&[a.cos(), a.sin(), 1.0], 0.0);
        b.add_le(&[-a.sin(), a.cos(), -1.0], 0.0);
    }
    for j in 0..3 {
        let mut row = [0.0; 3];
        row[j] = 1.0;
        b.add_le(&row, 1.0);
        row[j] = -1.0;
        b.add_le(&row, 1.0);
    }
    let res = solve_lp(&b.build().unwrap());
    assert_eq!(res.status, LpStatus::Optimal);
    assert!(res.max_violation <= 1e-12);
}
