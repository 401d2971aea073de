// Temporary probe: assemble the midpoint-projection system for LV+GLRK1
// by hand and inspect its residual landscape.
use nalgebra::{DMatrix, DVector};

fn theta(q: &[f64]) -> [f64; 2] {
    [q[1].ln() / q[0] + q[1], q[0]]
}
fn jac(q: &[f64]) -> [[f64; 2]; 2] {
    [
        [-q[1].ln() / (q[0] * q[0]), 1.0 / (q[0] * q[1]) + 1.0],
        [1.0, 0.0],
    ]
}
fn grad_h(q: &[f64]) -> [f64; 2] {
    [1.0 - 1.0 / q[0], 1.0 - 2.0 / q[1]]
}
fn force(q: &[f64], v: &[f64]) -> [f64; 2] {
    let j = jac(q);
    let g = grad_h(q);
    [
        j[0][0] * v[0] + j[1][0] * v[1] - g[0],
        j[0][1] * v[0] + j[1][1] * v[1] - g[1],
    ]
}

// unknowns w = [V1 (2), lambda (2)]
fn residual(w: &[f64], h: f64, qn: &[f64], pn: &[f64], out: &mut [f64]) {
    let v = &w[0..2];
    let lam = &w[2..4];
    // q increment = h * b1 * V = h*V for GLRK1
    let qbar_n = [qn[0] + h * lam[0], qn[1] + h * lam[1]];
    let qmid = [qbar_n[0] + 0.5 * h * v[0], qbar_n[1] + 0.5 * h * v[1]];
    let jm = jac(&qmid);
    // p displacement: J^T(qmid) lam
    let jt = [
        jm[0][0] * lam[0] + jm[1][0] * lam[1],
        jm[0][1] * lam[0] + jm[1][1] * lam[1],
    ];
    let pbar_n = [pn[0] + h * jt[0], pn[1] + h * jt[1]];
    // stage: Q1 = qbar_n + h/2 V ; residual theta(Q1) - pbar_n - h/2 F(Q1,V)
    let q1 = [qbar_n[0] + 0.5 * h * v[0], qbar_n[1] + 0.5 * h * v[1]];
    let th1 = theta(&q1);
    let f1 = force(&q1, v);
    out[0] = th1[0] - pbar_n[0] - 0.5 * h * f1[0];
    out[1] = th1[1] - pbar_n[1] - 0.5 * h * f1[1];
    // end of base step
    let qb1 = [qbar_n[0] + h * v[0], qbar_n[1] + h * v[1]];
    let pb1 = [pbar_n[0] + h * f1[0], pbar_n[1] + h * f1[1]];
    // projection with same sign and same gradient point
    let q_next = [qb1[0] + h * lam[0], qb1[1] + h * lam[1]];
    let p_next = [pb1[0] + h * jt[0], pb1[1] + h * jt[1]];
    let thn = theta(&q_next);
    out[2] = p_next[0] - thn[0];
    out[3] = p_next[1] - thn[1];
}

fn main() {
    let h = 0.1;
    let qn = [1.0, 1.0];
    let pn = theta(&qn);
    let mut w = vec![0.0; 4];
    let mut r = vec![0.0; 4];
    for it in 0..60 {
        residual(&w, h, &qn, &pn, &mut r);
        let norm = r.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        println!("it {it}: |r| = {norm:.3e}  w = {w:?}");
        if norm < 1e-14 {
            break;
        }
        // dense FD jacobian, full Newton
        let n = 4;
        let mut j = DMatrix::zeros(n, n);
        let mut rp = vec![0.0; n];
        for c in 0..n {
            let mut wp = w.clone();
            let hh = 1e-8 * (1.0 + wp[c].abs());
            wp[c] += hh;
            residual(&wp, h, &qn, &pn, &mut rp);
            for i in 0..n {
                j[(i, c)] = (rp[i] - r[i]) / hh;
            }
        }
        let rhs = DVector::from_fn(n, |i, _| -r[i]);
        let dx = j.lu().solve(&rhs).unwrap();
        for i in 0..n {
            w[i] += dx[i];
        }
    }
}
