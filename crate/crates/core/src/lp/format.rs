use std::fmt::Write;

use super::{LpModel, Relation};

fn term(out: &mut String, coeff: f64, name: &str) {
    let sign = if coeff < 0.0 { '-' } else { '+' };
    let _ = write!(out, " {sign} {} {name}", coeff.abs());
}

impl LpModel {
    /// Renders the model in CPLEX LP text format for cross-checking with
    /// external solvers. Rows are named `r0, r1, ...`; variable names are
    /// taken from the model.
    pub fn to_lp_string(&self) -> String {
        let mut out = String::from("Minimize\n obj:");
        let mut any = false;
        for (j, &c) in self.objective().iter().enumerate() {
            if c != 0.0 {
                term(&mut out, c, &self.variables()[j].name);
                any = true;
            }
        }
        if !any {
            out.push_str(" 0");
        }
        out.push_str("\nSubject To\n");
        for (r, row) in self.rows().iter().enumerate() {
            let _ = write!(out, " r{r}:");
            if row.coeffs.is_empty() {
                out.push_str(" 0");
            }
            for &(j, a) in &row.coeffs {
                term(&mut out, a, &self.variables()[j].name);
            }
            let op = match row.relation {
                Relation::LessEq => "<=",
                Relation::GreaterEq => ">=",
                Relation::Equal => "=",
            };
            let _ = writeln!(out, " {op} {}", row.rhs);
        }
        out.push_str("Bounds\n");
        for v in self.variables() {
            if v.lower == v.upper {
                let _ = writeln!(out, " {} = {}", v.name, v.lower);
            } else {
                let _ = writeln!(out, " {} <= {} <= {}", v.lower, v.name, v.upper);
            }
        }
        out.push_str("End\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::super::{LpModel, Relation, Row};

    #[test]
    fn renders_sections() {
        let mut m = LpModel::new();
        let a = m.add_variable("a", 0.0, 1.0, 3.0);
        let b = m.add_variable("b", 1.0, 1.0, 0.0);
        m.add_row(Row::new(vec![(a, 1.0), (b, -2.5)], Relation::GreaterEq, 1.0));
        assert_eq!(
            m.to_lp_string(),
            "Minimize\n obj: + 3 a\nSubject To\n r0: + 1 a - 2.5 b >= 1\nBounds\n 0 <= a <= 1\n b = 1\nEnd\n"
        );
    }
}
