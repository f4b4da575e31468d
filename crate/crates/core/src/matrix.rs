//! Dense transition-matrix views and their text rendering.

use num_complex::Complex64;

/// Dense matrix with rows indexed by source state and columns by target state.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    pub labels: Vec<String>,
    pub entries: Vec<Vec<Complex64>>,
}

impl DenseMatrix {
    pub fn zeros(labels: Vec<String>) -> Self {
        let n = labels.len();
        Self {
            labels,
            entries: vec![vec![Complex64::new(0.0, 0.0); n]; n],
        }
    }

    pub fn get(&self, row: &str, col: &str) -> Option<Complex64> {
        let r = self.labels.iter().position(|l| l == row)?;
        let c = self.labels.iter().position(|l| l == col)?;
        Some(self.entries[r][c])
    }

    /// Entries rounded to 0/1 when every entry is (numerically) 0 or 1.
    pub fn as_binary(&self) -> Option<Vec<Vec<u8>>> {
        self.entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|z| {
                        if z.norm() < 1e-12 {
                            Some(0)
                        } else if (z - Complex64::new(1.0, 0.0)).norm() < 1e-12 {
                            Some(1)
                        } else {
                            None
                        }
                    })
                    .collect()
            })
            .collect()
    }

    pub fn nonzero(&self) -> Vec<(String, String, Complex64)> {
        let mut out = Vec::new();
        for (i, row) in self.entries.iter().enumerate() {
            for (j, z) in row.iter().enumerate() {
                if z.norm() >= 1e-15 {
                    out.push((self.labels[i].clone(), self.labels[j].clone(), *z));
                }
            }
        }
        out
    }

    /// Aligned text grid with a header row of target labels.
    pub fn render(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .entries
            .iter()
            .map(|row| row.iter().map(|z| format_entry(*z)).collect())
            .collect();
        let label_w = self.labels.iter().map(|l| l.len()).max().unwrap_or(0);
        let col_w: Vec<usize> = (0..self.labels.len())
            .map(|j| {
                cells
                    .iter()
                    .map(|r| r[j].len())
                    .chain(std::iter::once(self.labels[j].len()))
                    .max()
                    .unwrap_or(1)
            })
            .collect();
        let mut out = String::new();
        out.push_str(&" ".repeat(label_w));
        for (j, l) in self.labels.iter().enumerate() {
            out.push_str(&format!("  {:>w$}", l, w = col_w[j]));
        }
        out.push('\n');
        for (i, row) in cells.iter().enumerate() {
            out.push_str(&format!("{:<w$}", self.labels[i], w = label_w));
            for (j, c) in row.iter().enumerate() {
                out.push_str(&format!("  {:>w$}", c, w = col_w[j]));
            }
            out.push('\n');
        }
        out
    }
}

fn format_entry(z: Complex64) -> String {
    let clean = |x: f64| if x.abs() < 1e-12 { 0.0 } else { x };
    let (re, im) = (clean(z.re), clean(z.im));
    let int_like = |x: f64| (x - x.round()).abs() < 1e-12;
    if im == 0.0 {
        if int_like(re) {
            format!("{}", re.round() as i64)
        } else {
            format!("{re:.4}")
        }
    } else if re == 0.0 {
        format!("{im:.4}i")
    } else {
        format!("{re:.4}{:+.4}i", im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_binary_grid() {
        let mut m = DenseMatrix::zeros(vec!["q0".into(), "q1".into()]);
        m.entries[0][1] = Complex64::new(1.0, 0.0);
        assert_eq!(m.render(), "    q0  q1\nq0   0   1\nq1   0   0\n");
        assert_eq!(m.as_binary().unwrap(), vec![vec![0, 1], vec![0, 0]]);
    }

    #[test]
    fn renders_complex_entries() {
        assert_eq!(format_entry(Complex64::new(0.5, -0.25)), "0.5000-0.2500i");
        assert_eq!(format_entry(Complex64::new(-1.0, 0.0)), "-1");
    }
}
