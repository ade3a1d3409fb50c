//! Parallel regime sweep: classify a list of (n, p, λ) points on a small
//! worker pool and emit deterministic CSV rows in input order.

use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use ou_liouville_core::fields::ProblemParams;
use ou_liouville_core::regime::{self, RegimeError};

pub struct Row {
    pub n: u32,
    pub p: f64,
    pub lambda: f64,
    pub classification: String,
    pub first_sign_change_r: Option<f64>,
}

pub fn run(
    points: &[(u32, f64, f64)],
    r_max: f64,
    grid_points: usize,
    jobs: usize,
) -> Result<Vec<Row>, RegimeError> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<Row, RegimeError>>>> =
        Mutex::new((0..points.len()).map(|_| None).collect());

    std::thread::scope(|scope| {
        for _ in 0..jobs.min(points.len().max(1)) {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                if k >= points.len() {
                    break;
                }
                let (n, p, lambda) = points[k];
                let row = ProblemParams::new(n, p, lambda)
                    .map_err(RegimeError::from)
                    .and_then(|params| regime::classify(&params, r_max, grid_points))
                    .map(|report| Row {
                        n,
                        p,
                        lambda,
                        classification: report.classification.to_string(),
                        first_sign_change_r: report.first_sign_change_r(),
                    });
                slots.lock().unwrap()[k] = Some(row);
            });
        }
    });

    slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|slot| slot.expect("every sweep point is classified"))
        .collect()
}

pub fn write_csv<W: Write>(rows: &[Row], mut out: W) -> std::io::Result<()> {
    writeln!(out, "n,p,lambda,classification,first_sign_change_r")?;
    for row in rows {
        writeln!(
            out,
            "{},{:.16e},{:.16e},{},{}",
            row.n,
            row.p,
            row.lambda,
            row.classification,
            row.first_sign_change_r
                .map(|r| format!("{r:.16e}"))
                .unwrap_or_default()
        )?;
    }
    Ok(())
}
