// temporary numeric probe; replaced by the acceptance suite
use relheat::field::FieldProfile;
use relheat::solver::{subordinated_diag_sweep, SweepOptions};

fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a * (b / a).powf(k as f64 / (n as f64 - 1.0))).collect()
}

#[test]
#[ignore]
fn probe_integer_flux_log_bound() {
    let start = std::time::Instant::now();
    let profile = FieldProfile::Step { b0: 2.0, r_support: 1.0 };
    let times = logspace(10.0, 500.0, 10);
    let opts = SweepOptions::default();
    let (pts, report) = subordinated_diag_sweep(&profile, 1.0, &times, &opts).unwrap();
    println!("elapsed: {:?}", start.elapsed());
    println!("diamag max ratio: {}", report.diamagnetic_max_ratio);
    for p in &pts {
        let q = p.t * p.t * (2.0 + p.t).ln().powi(2) * p.value;
        println!("t = {:8.3}  value = {:.8e}  t^2 log^2 v = {:.6}", p.t, p.value, q);
    }
}

#[test]
#[ignore]
fn probe_step_field_sweep() {
    let start = std::time::Instant::now();
    let profile = FieldProfile::Step { b0: 1.0, r_support: 1.0 };
    let times = logspace(10.0, 200.0, 8);
    let opts = SweepOptions::default();
    let (pts, report) = subordinated_diag_sweep(&profile, 1.0, &times, &opts).unwrap();
    println!("elapsed: {:?}", start.elapsed());
    println!("diamag max ratio: {}", report.diamagnetic_max_ratio);
    for p in &pts {
        println!("t = {:8.3}  value = {:.8e}  err = {:.2e}  t^3 v = {:.6}", p.t, p.value, p.error, p.t.powi(3) * p.value);
    }
    // log-log slope
    let n = pts.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for p in &pts {
        let x = p.t.ln();
        let y = p.value.ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let slope = (sxy - sx * sy / n) / (sxx - sx * sx / n);
    println!("fitted slope: {slope}");
}
