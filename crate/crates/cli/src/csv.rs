//! Fixed-format CSV: 15 significant digits, `,` delimiter, `\n` endings.

pub fn fmt_num(x: f64) -> String {
    format!("{x:.14e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row.to_vec());
    }

    pub fn render(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|x| fmt_num(*x))).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
    }

    /// Inverse of [`Table::render`].
    pub fn parse(text: &str) -> Option<Table> {
        let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let columns: Vec<String> = r.headers().ok()?.iter().map(str::to_string).collect();
        let rows = r
            .records()
            .map(|rec| rec.ok()?.iter().map(|x| x.parse().ok()).collect::<Option<Vec<f64>>>())
            .collect::<Option<Vec<_>>>()?;
        Some(Table { columns, rows })
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}
