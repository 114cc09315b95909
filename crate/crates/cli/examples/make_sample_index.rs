//! Writes `data/sample_index.csv`, a synthetic daily index for trying out
//! `critnet analyze`.
//!
//! Declines come in runs of 1 to 4 days whose total log drop is Pareto
//! distributed with density exponent 2.5 above 0.005. Each run is followed
//! by 1 to 3 up days that recover the drop plus a small drift.
//!
//! ```text
//! cargo run -p critnet --example make_sample_index [-- PATH]
//! ```

use std::fs::File;
use std::io::{BufWriter, Write};

use chrono::{Datelike, NaiveDate, Weekday};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ROWS: usize = 6000;
const DENSITY_EXPONENT: f64 = 2.5;
const SMALLEST_DROP: f64 = 0.005;

fn next_business_day(d: NaiveDate) -> NaiveDate {
    let mut d = d.succ_opt().unwrap();
    while matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
        d = d.succ_opt().unwrap();
    }
    d
}

fn main() -> std::io::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "data/sample_index.csv".into());
    let mut rng = ChaCha8Rng::seed_from_u64(20240101);
    let mut returns = Vec::with_capacity(ROWS);
    while returns.len() < ROWS - 1 {
        let u: f64 = 1.0 - rng.random::<f64>();
        let drop = SMALLEST_DROP * u.powf(-1.0 / (DENSITY_EXPONENT - 1.0));
        let days = rng.random_range(1..=4);
        returns.extend(std::iter::repeat_n(-drop / days as f64, days));
        let ups = rng.random_range(1..=3);
        let rise = drop * rng.random_range(0.9..1.15);
        returns.extend(std::iter::repeat_n(rise / ups as f64, ups));
    }
    returns.truncate(ROWS - 1);

    let mut out = BufWriter::new(File::create(&path)?);
    writeln!(out, "Date,Close")?;
    let mut date = NaiveDate::from_ymd_opt(2000, 1, 3).unwrap();
    let mut level = 1000.0f64;
    writeln!(out, "{date},{level:.4}")?;
    for r in returns {
        date = next_business_day(date);
        level *= r.exp();
        writeln!(out, "{date},{level:.4}")?;
    }
    out.flush()?;
    eprintln!("wrote {ROWS} rows to {path}");
    Ok(())
}
