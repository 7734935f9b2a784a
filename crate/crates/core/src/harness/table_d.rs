//! Tabulated parabolic cylinder functions.

use num_complex::Complex64;
use serde::Serialize;

use super::config::TableDConfig;
use crate::special::{parabolic_cylinder_d_full, MAX_REL_ERROR};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableDRow {
    pub nu: f64,
    pub z_re: f64,
    pub z_im: f64,
    pub d_re: f64,
    pub d_im: f64,
    pub dprime_re: f64,
    pub dprime_im: f64,
    pub rel_error: f64,
    /// `ok`, `imprecise` (estimated error above the library bound) or
    /// `out-of-domain`.
    pub status: &'static str,
}

impl TableDRow {
    pub const HEADER: [&'static str; 9] = [
        "nu",
        "z_re",
        "z_im",
        "D_re",
        "D_im",
        "dD_re",
        "dD_im",
        "rel_error",
        "status",
    ];
}

pub fn table_d(cfg: &TableDConfig) -> Vec<TableDRow> {
    let n = cfg.points;
    let mut rows = Vec::with_capacity(n * cfg.nu_list.len());
    for &nu in &cfg.nu_list {
        for i in 0..n {
            let t = i as f64 / (n - 1) as f64;
            let z = Complex64::new(cfg.z_min + t * (cfg.z_max - cfg.z_min), cfg.z_imag);
            let row = match parabolic_cylinder_d_full(nu, z) {
                Ok(d) => TableDRow {
                    nu,
                    z_re: z.re,
                    z_im: z.im,
                    d_re: d.value.re,
                    d_im: d.value.im,
                    dprime_re: d.derivative.re,
                    dprime_im: d.derivative.im,
                    rel_error: d.rel_error,
                    status: if d.rel_error <= MAX_REL_ERROR {
                        "ok"
                    } else {
                        "imprecise"
                    },
                },
                Err(_) => TableDRow {
                    nu,
                    z_re: z.re,
                    z_im: z.im,
                    d_re: f64::NAN,
                    d_im: f64::NAN,
                    dprime_re: f64::NAN,
                    dprime_im: f64::NAN,
                    rel_error: f64::NAN,
                    status: "out-of-domain",
                },
            };
            rows.push(row);
        }
    }
    rows
}
