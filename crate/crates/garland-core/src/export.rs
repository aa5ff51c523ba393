//! Deterministic CSV renderings of the analysis series. Floats print in
//! Rust's shortest round-trip form, so identical inputs give identical
//! bytes.

use std::fmt::Write as _;

use crate::analysis::{DcRow, DensityRow, PartitionRow};
use crate::cayley::GrowthStats;

pub fn growth_csv(stats: &GrowthStats) -> String {
    let mut out = String::from("n,ball_size,sphere_size,nth_root,fekete_inf\n");
    for r in &stats.rows {
        let _ = writeln!(out, "{},{},{},{},{}", r.n, r.ball_size, r.sphere_size, r.nth_root, r.fekete_inf);
    }
    out
}

pub fn dc_csv(rows: &[DcRow]) -> String {
    let mut out = String::from("n,ball,pairs,dc\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", r.n, r.ball, r.pairs, r.dc);
    }
    out
}

pub fn density_csv(rows: &[DensityRow]) -> String {
    let mut out = String::from("n,ball,count,density\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", r.n, r.ball, r.count, r.density);
    }
    out
}

pub fn partition_csv(rows: &[PartitionRow]) -> String {
    let mut out = String::from("n,R_q,R_q_flat,R_q_f\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", r.n, r.r_q, r.r_q_flat, r.r_q_f);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis;
    use crate::cayley::{enumerate_ball, growth_stats};
    use crate::presets;

    #[test]
    fn csv_is_reproducible_byte_for_byte() {
        let (shape, s) = presets::lamplighter().unwrap();
        let render = || {
            let ball = enumerate_ball(&shape, &s, 8, 1_000_000).unwrap();
            let stats = growth_stats(&ball.ball_sizes()).unwrap();
            let density = analysis::density_series(&ball, analysis::in_base_group);
            let (dc, _) = analysis::dc_series(&ball, &shape, 10_000_000).unwrap();
            format!("{}{}{}", growth_csv(&stats), density_csv(&density), dc_csv(&dc))
        };
        assert_eq!(render(), render());
    }

    #[test]
    fn headers_match_the_documented_columns() {
        assert!(growth_csv(&growth_stats(&[1]).unwrap()).starts_with("n,ball_size,sphere_size,nth_root,fekete_inf\n"));
        assert!(dc_csv(&[]).starts_with("n,ball,pairs,dc\n"));
        assert!(density_csv(&[]).starts_with("n,ball,count,density\n"));
        assert!(partition_csv(&[]).starts_with("n,R_q,R_q_flat,R_q_f\n"));
    }
}
