use std::io::{Read, Write};

use homfill::filling::ProfileSample;

use crate::UsageError;

pub const HEADER: [&str; 4] = ["l", "max_fill", "cycles_sampled", "certified"];

pub fn write_profile<W: Write>(w: W, samples: &[ProfileSample]) -> anyhow::Result<()> {
    let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    out.write_record(HEADER)?;
    for s in samples {
        out.write_record([s.ell.to_string(), s.fill.to_string(), s.count.to_string(), s.certified.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_profile<R: Read>(r: R, name: &str) -> Result<Vec<ProfileSample>, UsageError> {
    let bad = |m: String| UsageError(format!("{name}: {m}"));
    let mut rd = csv::ReaderBuilder::new().from_reader(r);
    let header = rd.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.is_empty() {
        return Err(bad("empty file".into()));
    }
    if header.iter().collect::<Vec<_>>() != HEADER {
        return Err(bad(format!("expected header {}, found {}", HEADER.join(","), header.iter().collect::<Vec<_>>().join(","))));
    }
    let mut out = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let field = |j: usize| -> Result<u64, UsageError> {
            rec[j].trim().parse().map_err(|_| bad(format!("row {}: bad {} {:?}", i + 2, HEADER[j], &rec[j])))
        };
        let certified = match rec[3].trim() {
            "true" => true,
            "false" => false,
            other => return Err(bad(format!("row {}: bad certified {other:?}", i + 2))),
        };
        out.push(ProfileSample { ell: field(0)?, fill: field(1)?, count: field(2)? as usize, certified });
    }
    if out.is_empty() {
        return Err(bad("no samples".into()));
    }
    if out.windows(2).any(|w| w[0].ell >= w[1].ell) {
        return Err(bad("lengths must be strictly increasing".into()));
    }
    Ok(out)
}
