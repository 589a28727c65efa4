//! The forms.csv stream format.

use crate::enumerate::FieldClassRecord;
use crate::error::{Error, ParseErrorKind, Result};
use crate::shape::UHPoint;
use std::io::{Read, Write};

pub const FORMS_HEADER: [&str; 10] = ["a", "b", "c", "d", "disc", "i", "s3", "maximal", "x", "y"];

/// Writes records with 0/1 flags and shortest round-trip floats.
pub fn write_forms<W: Write>(out: W, records: &[FieldClassRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(FORMS_HEADER)?;
    for r in records {
        let [a, b, c, d] = r.form;
        w.write_record([
            a.to_string(),
            b.to_string(),
            c.to_string(),
            d.to_string(),
            r.disc.to_string(),
            r.signature.to_string(),
            u8::from(r.s3).to_string(),
            u8::from(r.maximal).to_string(),
            r.shape.x.to_string(),
            r.shape.y.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn forms_to_string(records: &[FieldClassRecord]) -> Result<String> {
    let mut buf = Vec::new();
    write_forms(&mut buf, records)?;
    String::from_utf8(buf).map_err(|e| Error::Invariant(e.to_string()))
}

pub fn read_forms<R: Read>(input: R) -> Result<Vec<FieldClassRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = rdr.headers()?.clone();
    if header.iter().map(str::trim).ne(FORMS_HEADER) {
        return Err(Error::Parse { line: 1, column: 1, kind: ParseErrorKind::MissingField });
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let field = |k: usize| row.get(k).map(str::trim).ok_or(Error::Parse { line, column: k + 1, kind: ParseErrorKind::MissingField });
        let int = |k: usize| -> Result<i64> {
            let s = field(k)?;
            s.parse().map_err(|_| Error::Parse { line, column: k + 1, kind: ParseErrorKind::BadInteger(s.into()) })
        };
        let flag = |k: usize| -> Result<bool> {
            match field(k)? {
                "0" => Ok(false),
                "1" => Ok(true),
                s => Err(Error::Parse { line, column: k + 1, kind: ParseErrorKind::BadInteger(s.into()) }),
            }
        };
        let float = |k: usize| -> Result<f64> {
            let s = field(k)?;
            s.parse().map_err(|_| Error::Parse { line, column: k + 1, kind: ParseErrorKind::BadRational(s.into()) })
        };
        let signature = int(5)?;
        if !(0..=1).contains(&signature) {
            return Err(Error::Parse { line, column: 6, kind: ParseErrorKind::BadInteger(signature.to_string()) });
        }
        out.push(FieldClassRecord {
            form: [int(0)?, int(1)?, int(2)?, int(3)?],
            disc: int(4)?,
            signature: signature as u8,
            s3: flag(6)?,
            maximal: flag(7)?,
            shape: UHPoint::new(float(8)?, float(9)?)?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{enumerate_classes, EnumerationTask, SignatureFilter};

    #[test]
    fn round_trip() {
        let recs = enumerate_classes(&EnumerationTask::new(2000, SignatureFilter::Both).include_c3(true)).unwrap();
        let text = forms_to_string(&recs).unwrap();
        assert!(text.starts_with("a,b,c,d,disc,i,s3,maximal,x,y\n"));
        let back = read_forms(text.as_bytes()).unwrap();
        assert_eq!(back, recs);
        assert_eq!(forms_to_string(&back).unwrap(), text);
    }

    #[test]
    fn rejects_bad_flag() {
        let t = "a,b,c,d,disc,i,s3,maximal,x,y\n1,0,-1,-1,-23,1,2,1,0.4,0.9\n";
        assert!(matches!(read_forms(t.as_bytes()), Err(Error::Parse { line: 2, column: 7, .. })));
    }
}
