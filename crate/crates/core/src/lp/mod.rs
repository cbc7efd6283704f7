//! Linear programs: a small model type, a dense simplex solver, and the
//! poise LP built on top of them.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

pub mod poise;
pub mod simplex;

pub use poise::{build_poise_lp, decompose_flows, solve_lp, solve_poise, PoiseFractional, PoiseLp, WeightedPath};
pub use simplex::{solve, LpSolution};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub name: String,
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// `minimize objective` subject to `rows`, `0 <= x_j <= upper_j`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinearProgram {
    pub names: Vec<String>,
    pub upper: Vec<Option<f64>>,
    pub objective: Vec<(usize, f64)>,
    pub rows: Vec<Row>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: &str, upper: Option<f64>) -> usize {
        self.names.push(String::from(name));
        self.upper.push(upper);
        self.names.len() - 1
    }

    pub fn set_objective(&mut self, coeffs: Vec<(usize, f64)>) {
        self.objective = coeffs;
    }

    pub fn add_row(&mut self, name: &str, coeffs: Vec<(usize, f64)>, sense: Sense, rhs: f64) {
        self.rows.push(Row { name: String::from(name), coeffs, sense, rhs });
    }

    pub fn var_count(&self) -> usize {
        self.names.len()
    }

    /// CPLEX LP text format.
    pub fn to_lp_format(&self) -> String {
        let mut out = String::from("Minimize\n obj:");
        self.write_terms(&mut out, &self.objective);
        out.push_str("\nSubject To\n");
        for row in &self.rows {
            let _ = write!(out, " {}:", row.name);
            self.write_terms(&mut out, &row.coeffs);
            let op = match row.sense {
                Sense::Le => "<=",
                Sense::Ge => ">=",
                Sense::Eq => "=",
            };
            let _ = writeln!(out, " {op} {}", row.rhs);
        }
        out.push_str("Bounds\n");
        for (name, ub) in self.names.iter().zip(&self.upper) {
            match ub {
                Some(u) => {
                    let _ = writeln!(out, " 0 <= {name} <= {u}");
                }
                None => {
                    let _ = writeln!(out, " {name} >= 0");
                }
            }
        }
        out.push_str("End\n");
        out
    }

    fn write_terms(&self, out: &mut String, coeffs: &[(usize, f64)]) {
        if coeffs.is_empty() {
            out.push_str(" 0");
        }
        for &(j, c) in coeffs {
            let sign = if c < 0.0 { '-' } else { '+' };
            out.push_str(&format!(" {sign} {} {}", c.abs(), self.names[j]));
        }
    }
}
