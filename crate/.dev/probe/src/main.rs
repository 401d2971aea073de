// Probe 2: consistency analysis of the midpoint-projected GLRK1 system on LV.
use nalgebra::{DMatrix, DVector};

fn theta(q: &[f64]) -> [f64; 2] { [q[1].ln() / q[0] + q[1], q[0]] }
fn jac(q: &[f64]) -> [[f64; 2]; 2] {
    [[-q[1].ln() / (q[0] * q[0]), 1.0 / (q[0] * q[1]) + 1.0], [1.0, 0.0]]
}
fn grad_h(q: &[f64]) -> [f64; 2] { [1.0 - 1.0 / q[0], 1.0 - 2.0 / q[1]] }

// reduced stage equation in c1: theta(Q) - p_n - h J^T(Q) c1 + h/2 gradH(Q) = 0, Q = q_n + h c1
fn stage_res(c1: &[f64], h: f64, qn: &[f64], pn: &[f64], out: &mut [f64]) {
    let q = [qn[0] + h * c1[0], qn[1] + h * c1[1]];
    let j = jac(&q);
    let th = theta(&q);
    let g = grad_h(&q);
    for k in 0..2 {
        let jt = j[0][k] * c1[0] + j[1][k] * c1[1];
        out[k] = th[k] - pn[k] - h * jt + 0.5 * h * g[k];
    }
}

fn newton2<F: Fn(&[f64], &mut [f64])>(f: F, x0: &[f64]) -> Vec<f64> {
    let mut x = x0.to_vec();
    let mut r = vec![0.0; 2];
    for _ in 0..50 {
        f(&x, &mut r);
        let n = r.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if n < 1e-14 { break; }
        let mut jm = DMatrix::zeros(2, 2);
        let mut rp = vec![0.0; 2];
        for c in 0..2 {
            let mut xp = x.clone();
            let hh = 1e-8;
            xp[c] += hh;
            f(&xp, &mut rp);
            for i in 0..2 { jm[(i, c)] = (rp[i] - r[i]) / hh; }
        }
        let dx = jm.lu().solve(&DVector::from_fn(2, |i, _| -r[i])).unwrap();
        for i in 0..2 { x[i] += dx[i]; }
    }
    x
}

// full 4d system with selectable output sign
fn full_res(w: &[f64], h: f64, qn: &[f64], pn: &[f64], s_out: f64, out: &mut [f64]) {
    let v = &w[0..2];
    let lam = &w[2..4];
    let qbar_n = [qn[0] + h * lam[0], qn[1] + h * lam[1]];
    let qmid = [qbar_n[0] + 0.5 * h * v[0], qbar_n[1] + 0.5 * h * v[1]];
    let jm = jac(&qmid);
    let jt = [jm[0][0] * lam[0] + jm[1][0] * lam[1], jm[0][1] * lam[0] + jm[1][1] * lam[1]];
    let pbar_n = [pn[0] + h * jt[0], pn[1] + h * jt[1]];
    let q1 = qmid;
    let th1 = theta(&q1);
    let j1 = jac(&q1);
    let g1 = grad_h(&q1);
    let f1 = [j1[0][0] * v[0] + j1[1][0] * v[1] - g1[0], j1[0][1] * v[0] + j1[1][1] * v[1] - g1[1]];
    out[0] = th1[0] - pbar_n[0] - 0.5 * h * f1[0];
    out[1] = th1[1] - pbar_n[1] - 0.5 * h * f1[1];
    let qb1 = [qbar_n[0] + h * v[0], qbar_n[1] + h * v[1]];
    let pb1 = [pbar_n[0] + h * f1[0], pbar_n[1] + h * f1[1]];
    let q_next = [qb1[0] + s_out * h * lam[0], qb1[1] + s_out * h * lam[1]];
    let p_next = [pb1[0] + s_out * h * jt[0], pb1[1] + s_out * h * jt[1]];
    let thn = theta(&q_next);
    out[2] = p_next[0] - thn[0];
    out[3] = p_next[1] - thn[1];
}

fn main() {
    let h = 0.1;
    let qn = [1.0, 1.0];
    let pn = theta(&qn);
    // consistency of the same-sign system: solve stage block, evaluate constraint block
    let c1 = newton2(|c, out| stage_res(c, h, &qn, &pn, out), &[0.0, 0.0]);
    let q = [qn[0] + h * c1[0], qn[1] + h * c1[1]];
    let q_next = [2.0 * q[0] - qn[0], 2.0 * q[1] - qn[1]];
    let th_mid = theta(&q);
    let th_next = theta(&q_next);
    let mismatch = [
        2.0 * th_mid[0] - pn[0] - th_next[0],
        2.0 * th_mid[1] - pn[1] - th_next[1],
    ];
    println!("c1 = {c1:?}");
    println!("same-sign consistency mismatch = {mismatch:?}");

    // full Newton with s_out = -1 (R(inf) of the midpoint rule)
    for s_out in [1.0, -1.0] {
        let mut w = vec![0.0; 4];
        let mut r = vec![0.0; 4];
        for it in 0..30 {
            full_res(&w, h, &qn, &pn, s_out, &mut r);
            let n = r.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            if it > 25 || n < 1e-14 {
                println!("s_out={s_out}: it {it} |r| = {n:.3e} w = {w:?}");
                if n < 1e-14 { break; }
            }
            let mut jm = DMatrix::zeros(4, 4);
            let mut rp = vec![0.0; 4];
            for c in 0..4 {
                let mut wp = w.clone();
                let hh = 1e-8 * (1.0 + wp[c].abs());
                wp[c] += hh;
                full_res(&wp, h, &qn, &pn, s_out, &mut rp);
                for i in 0..4 { jm[(i, c)] = (rp[i] - r[i]) / hh; }
            }
            match jm.lu().solve(&DVector::from_fn(4, |i, _| -r[i])) {
                Some(dx) => for i in 0..4 { w[i] += dx[i]; },
                None => { println!("s_out={s_out}: singular at it {it}"); break; }
            }
        }
    }
}
