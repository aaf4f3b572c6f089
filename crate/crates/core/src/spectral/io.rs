//! CSV export of eigensystems: a `# source=<numeric|analytic>` line, a header
//! `index,eigenvalue,v_1,...,v_n`, then one row per mode. Values are written
//! in shortest round-trip form, so reading back is exact.

use std::io::{BufRead, BufReader, Read, Write};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::spectral::{EigenSystem, Source};

pub fn write_eigensystem_csv<T: Scalar, W: Write>(w: W, sys: &EigenSystem<T>) -> Result<()> {
    let mut w = w;
    let source = match sys.source() {
        Source::Numeric => "numeric",
        Source::Analytic => "analytic",
    };
    writeln!(w, "# source={source}")?;
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["index".to_string(), "eigenvalue".to_string()];
    header.extend((1..=sys.n()).map(|i| format!("v_{i}")));
    out.write_record(&header)?;
    for (j, &lam) in sys.values().iter().enumerate() {
        let mut rec = vec![j.to_string(), lam.to_string()];
        rec.extend(sys.vector(j).iter().map(|x| x.to_string()));
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_eigensystem_csv<T: Scalar, R: Read>(r: R) -> Result<EigenSystem<T>> {
    let mut reader = BufReader::new(r);
    let mut first = String::new();
    reader.read_line(&mut first)?;
    let source = match first.trim().strip_prefix("# source=") {
        Some("numeric") => Source::Numeric,
        Some("analytic") => Source::Analytic,
        _ => return Err(Error::Parse("missing `# source=` line".into())),
    };
    let mut csv_reader = csv::Reader::from_reader(reader);
    let n = csv_reader.headers()?.len().saturating_sub(2);
    let mut values = Vec::new();
    let mut data = Vec::new();
    for (row, rec) in csv_reader.records().enumerate() {
        let rec = rec?;
        if rec.len() != n + 2 {
            return Err(Error::Parse(format!("row {row}: expected {} fields", n + 2)));
        }
        let parse = |s: &str| -> Result<T> {
            s.trim().parse::<f64>().map(T::lit).map_err(|_| Error::Parse(format!("row {row}: bad number {s:?}")))
        };
        values.push(parse(&rec[1])?);
        for field in rec.iter().skip(2) {
            data.push(parse(field)?);
        }
    }
    let k = values.len();
    Ok(EigenSystem::from_sorted(values, Matrix::from_vec(k, n, data)?, source))
}
