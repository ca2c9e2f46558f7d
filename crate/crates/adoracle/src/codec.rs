//! Binary oracle files.
//!
//! Little-endian, versioned, with a CRC-32 trailer over every preceding
//! byte. The layout is documented in the repository README.

use adoracle_core::composite::{BuildInfo, CompositeOracle, CompositeParts, FarTable, OracleKind, Params};
use adoracle_core::params::{ParamMode, ParamsNearLinear, ParamsSmallK, RadicalConstant};
use adoracle_core::sssp::SampleAssignment;
use adoracle_core::tz::{TzOracle, TzParts};
use adoracle_core::{Distance, Rational};

pub const MAGIC: [u8; 4] = *b"ADOR";
pub const VERSION: u32 = 1;

const FLAG_CONTRACTED: u8 = 1;
const FLAG_LARGEST_COMPONENT: u8 = 2;
const NO_VERTEX: u32 = u32::MAX;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("not an oracle file (bad magic)")]
    BadMagic,
    #[error("unsupported format version {0} (expected {VERSION})")]
    UnsupportedVersion(u32),
    #[error("file truncated")]
    Truncated,
    #[error("checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    Checksum { stored: u32, computed: u32 },
    #[error("malformed file: {0}")]
    Malformed(String),
}

/// How input vertex labels map to oracle vertex ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    /// Original label of each input vertex, ascending.
    pub labels: Vec<u64>,
    /// Oracle id of each input vertex; `None` when dropped by
    /// largest-component extraction.
    pub mapped: Vec<Option<u32>>,
    pub contracted: bool,
    pub largest_component: bool,
}

impl LabelMap {
    pub fn identity(n: usize) -> Self {
        LabelMap {
            labels: (0..n as u64).collect(),
            mapped: (0..n as u32).map(Some).collect(),
            contracted: false,
            largest_component: false,
        }
    }

    /// Oracle id for an input label.
    pub fn resolve(&self, label: u64) -> Option<u32> {
        let idx = self.labels.binary_search(&label).ok()?;
        self.mapped[idx]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleFile {
    pub oracle: CompositeOracle,
    pub labels: Option<LabelMap>,
}

struct Writer {
    buf: Vec<u8>,
    entries: usize,
}

impl Writer {
    fn u8(&mut self, x: u8) {
        self.buf.push(x);
    }
    fn u16(&mut self, x: u16) {
        self.buf.extend_from_slice(&x.to_le_bytes());
    }
    fn u32(&mut self, x: u32) {
        self.buf.extend_from_slice(&x.to_le_bytes());
    }
    fn u64(&mut self, x: u64) {
        self.buf.extend_from_slice(&x.to_le_bytes());
    }
    fn len(&mut self, x: usize) {
        self.u64(x as u64);
    }
    fn bool(&mut self, x: bool) {
        self.u8(x as u8);
    }
    fn rational(&mut self, r: Rational) {
        self.u64(*r.numer());
        self.u64(*r.denom());
    }
    /// One stored record: vertex id plus distance.
    fn entry(&mut self, (v, d): (u32, Distance)) {
        self.u32(v);
        self.u64(d);
        self.entries += 1;
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

fn malformed(what: impl Into<String>) -> CodecError {
    CodecError::Malformed(what.into())
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], CodecError> {
        let end = self.pos.checked_add(n).ok_or(CodecError::Truncated)?;
        let out = self.buf.get(self.pos..end).ok_or(CodecError::Truncated)?;
        self.pos = end;
        Ok(out)
    }
    fn array<const N: usize>(&mut self) -> Result<[u8; N], CodecError> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }
    fn u8(&mut self) -> Result<u8, CodecError> {
        Ok(self.take(1)?[0])
    }
    fn u16(&mut self) -> Result<u16, CodecError> {
        self.array().map(u16::from_le_bytes)
    }
    fn u32(&mut self) -> Result<u32, CodecError> {
        self.array().map(u32::from_le_bytes)
    }
    fn u64(&mut self) -> Result<u64, CodecError> {
        self.array().map(u64::from_le_bytes)
    }
    /// A count, bounded by what the remaining bytes could hold.
    fn len(&mut self, item_bytes: usize) -> Result<usize, CodecError> {
        let n = self.u64()?;
        let remaining = (self.buf.len() - self.pos) as u64;
        if n.saturating_mul(item_bytes.max(1) as u64) > remaining {
            return Err(CodecError::Truncated);
        }
        Ok(n as usize)
    }
    fn bool(&mut self) -> Result<bool, CodecError> {
        match self.u8()? {
            0 => Ok(false),
            1 => Ok(true),
            b => Err(malformed(format!("boolean byte {b}"))),
        }
    }
    fn usize(&mut self) -> Result<usize, CodecError> {
        usize::try_from(self.u64()?).map_err(|_| malformed("value exceeds usize"))
    }
    fn rational(&mut self) -> Result<Rational, CodecError> {
        let (n, d) = (self.u64()?, self.u64()?);
        if d == 0 {
            return Err(malformed("zero denominator"));
        }
        Ok(Rational::new(n, d))
    }
    fn entry(&mut self) -> Result<(u32, Distance), CodecError> {
        Ok((self.u32()?, self.u64()?))
    }
}

fn kind_code(k: OracleKind) -> u8 {
    match k {
        OracleKind::Plain => 0,
        OracleKind::Warmup => 1,
        OracleKind::SmallK => 2,
        OracleKind::NearLinear => 3,
    }
}

fn kind_from(code: u8) -> Result<OracleKind, CodecError> {
    Ok(match code {
        0 => OracleKind::Plain,
        1 => OracleKind::Warmup,
        2 => OracleKind::SmallK,
        3 => OracleKind::NearLinear,
        c => return Err(malformed(format!("oracle kind {c}"))),
    })
}

fn write_params(w: &mut Writer, p: &Params) {
    match *p {
        Params::Plain { kappa } => w.len(kappa),
        Params::Warmup { k, epsilon, spanner_t } => {
            w.len(k);
            w.rational(epsilon);
            w.len(spanner_t);
        }
        Params::SmallK(p) => {
            w.len(p.k);
            w.len(p.k_prime);
            w.rational(p.i);
        }
        Params::NearLinear(p) => {
            w.len(p.k);
            w.u8(match p.mode {
                ParamMode::ConstantC => 0,
                ParamMode::LargeK => 1,
            });
            w.u64(p.c.a);
            w.u64(p.c.b);
            w.u64(p.c.radicand);
            w.len(p.kappa);
            w.rational(p.i);
            w.len(p.k_prime);
        }
    }
}

fn read_params(r: &mut Reader, kind: OracleKind) -> Result<Params, CodecError> {
    Ok(match kind {
        OracleKind::Plain => Params::Plain { kappa: r.usize()? },
        OracleKind::Warmup => Params::Warmup {
            k: r.usize()?,
            epsilon: r.rational()?,
            spanner_t: r.usize()?,
        },
        OracleKind::SmallK => Params::SmallK(ParamsSmallK {
            k: r.usize()?,
            k_prime: r.usize()?,
            i: r.rational()?,
        }),
        OracleKind::NearLinear => {
            let k = r.usize()?;
            let mode = match r.u8()? {
                0 => ParamMode::ConstantC,
                1 => ParamMode::LargeK,
                m => return Err(malformed(format!("parameter mode {m}"))),
            };
            let c = RadicalConstant {
                a: r.u64()?,
                b: r.u64()?,
                radicand: r.u64()?,
            };
            Params::NearLinear(ParamsNearLinear {
                k,
                mode,
                c,
                kappa: r.usize()?,
                i: r.rational()?,
                k_prime: r.usize()?,
            })
        }
    })
}

fn write_info(w: &mut Writer, info: &BuildInfo) {
    w.u64(info.seed);
    w.u8(kind_code(info.requested));
    w.len(info.requested_k);
    w.bool(info.fallback);
    w.len(info.sampling_rounds);
    w.bool(info.sampling_accepted);
    w.len(info.sparsified_edges);
    w.len(info.spanner_edges);
    w.len(info.graph_vertices);
    w.len(info.graph_edges);
}

fn read_info(r: &mut Reader) -> Result<BuildInfo, CodecError> {
    Ok(BuildInfo {
        seed: r.u64()?,
        requested: kind_from(r.u8()?)?,
        requested_k: r.usize()?,
        fallback: r.bool()?,
        sampling_rounds: r.usize()?,
        sampling_accepted: r.bool()?,
        sparsified_edges: r.usize()?,
        spanner_edges: r.usize()?,
        graph_vertices: r.usize()?,
        graph_edges: r.usize()?,
    })
}

fn write_assignment(w: &mut Writer, a: &SampleAssignment) {
    match a.exponent {
        Some(e) => {
            w.u8(1);
            w.rational(e);
        }
        None => w.u8(0),
    }
    match a.probability {
        Some(p) => {
            w.u8(1);
            w.u64(p.to_bits());
        }
        None => w.u8(0),
    }
    w.len(a.samples().len());
    for &s in a.samples() {
        w.u32(s as u32);
    }
    w.len(a.distances().len());
    for (p, &d) in a.nearest_all().zip(a.distances()) {
        w.entry((p as u32, d));
    }
    // p_S and d_S count as one entry each
    w.entries += a.distances().len();
}

fn read_assignment(r: &mut Reader) -> Result<SampleAssignment, CodecError> {
    let exponent = match r.u8()? {
        0 => None,
        1 => Some(r.rational()?),
        b => return Err(malformed(format!("option tag {b}"))),
    };
    let probability = match r.u8()? {
        0 => None,
        1 => Some(f64::from_bits(r.u64()?)),
        b => return Err(malformed(format!("option tag {b}"))),
    };
    let s = r.len(4)?;
    let samples = (0..s).map(|_| r.u32().map(|x| x as usize)).collect::<Result<Vec<_>, _>>()?;
    let n = r.len(12)?;
    let mut nearest = Vec::with_capacity(n);
    let mut dist = Vec::with_capacity(n);
    for _ in 0..n {
        let (p, d) = r.entry()?;
        nearest.push(p as usize);
        dist.push(d);
    }
    let mut a = SampleAssignment::from_parts(samples, nearest, dist).ok_or_else(|| malformed("sample arrays"))?;
    a.exponent = exponent;
    a.probability = probability;
    Ok(a)
}

fn write_tz(w: &mut Writer, o: &TzOracle) {
    let p = o.to_parts();
    w.len(p.n);
    w.len(p.kappa);
    w.len(p.requested_kappa);
    w.bool(p.connected);
    w.len(p.level_rounds);
    for &l in &p.level {
        w.u16(l);
    }
    match &p.restriction {
        Some(set) => {
            w.u8(1);
            w.len(set.len());
            for &v in set {
                w.u32(v as u32);
            }
        }
        None => w.u8(0),
    }
    for &e in &p.pivots {
        w.entry(e);
    }
    let stored = p.bunch_offsets.len() - 1;
    for s in 0..stored {
        w.u32((p.bunch_offsets[s + 1] - p.bunch_offsets[s]) as u32);
    }
    for &e in &p.bunch {
        w.entry(e);
    }
}

fn read_tz(r: &mut Reader) -> Result<TzOracle, CodecError> {
    let n = r.len(2)?;
    let kappa = r.usize()?;
    let requested_kappa = r.usize()?;
    let connected = r.bool()?;
    let level_rounds = r.usize()?;
    let level = (0..n).map(|_| r.u16()).collect::<Result<Vec<_>, _>>()?;
    let restriction = match r.u8()? {
        0 => None,
        1 => {
            let s = r.len(4)?;
            Some((0..s).map(|_| r.u32().map(|x| x as usize)).collect::<Result<Vec<_>, _>>()?)
        }
        b => return Err(malformed(format!("option tag {b}"))),
    };
    let stored = restriction.as_ref().map_or(n, Vec::len);
    let pivot_count = stored.checked_mul(kappa).ok_or_else(|| malformed("pivot count"))?;
    if pivot_count.saturating_mul(12) > r.buf.len() - r.pos {
        return Err(CodecError::Truncated);
    }
    let pivots = (0..pivot_count).map(|_| r.entry()).collect::<Result<Vec<_>, _>>()?;
    let mut bunch_offsets = Vec::with_capacity(stored + 1);
    bunch_offsets.push(0usize);
    for _ in 0..stored {
        let len = r.u32()? as usize;
        bunch_offsets.push(bunch_offsets.last().unwrap() + len);
    }
    let total = *bunch_offsets.last().unwrap();
    if total.saturating_mul(12) > r.buf.len() - r.pos {
        return Err(CodecError::Truncated);
    }
    let bunch = (0..total).map(|_| r.entry()).collect::<Result<Vec<_>, _>>()?;
    TzOracle::from_parts(TzParts {
        n,
        kappa,
        requested_kappa,
        level,
        restriction,
        pivots,
        bunch_offsets,
        bunch,
        connected,
        level_rounds,
    })
    .map_err(|e| malformed(e.to_string()))
}

fn write_labels(w: &mut Writer, labels: &LabelMap) {
    let mut flags = 0;
    if labels.contracted {
        flags |= FLAG_CONTRACTED;
    }
    if labels.largest_component {
        flags |= FLAG_LARGEST_COMPONENT;
    }
    w.u8(flags);
    w.len(labels.labels.len());
    for (&l, &m) in labels.labels.iter().zip(&labels.mapped) {
        w.u64(l);
        w.u32(m.unwrap_or(NO_VERTEX));
    }
}

fn read_labels(r: &mut Reader, n: usize) -> Result<LabelMap, CodecError> {
    let flags = r.u8()?;
    if flags & !(FLAG_CONTRACTED | FLAG_LARGEST_COMPONENT) != 0 {
        return Err(malformed(format!("label flags {flags:#x}")));
    }
    let count = r.len(12)?;
    let mut labels = Vec::with_capacity(count);
    let mut mapped = Vec::with_capacity(count);
    for _ in 0..count {
        labels.push(r.u64()?);
        let m = r.u32()?;
        if m != NO_VERTEX && m as usize >= n {
            return Err(malformed("label maps outside the oracle"));
        }
        mapped.push((m != NO_VERTEX).then_some(m));
    }
    Ok(LabelMap {
        labels,
        mapped,
        contracted: flags & FLAG_CONTRACTED != 0,
        largest_component: flags & FLAG_LARGEST_COMPONENT != 0,
    })
}

/// Encodes an oracle, returning the bytes and the number of stored entry
/// records written (equal to `storage().total()`).
pub fn encode_counted(file: &OracleFile) -> (Vec<u8>, usize) {
    let parts = file.oracle.to_parts();
    let mut w = Writer {
        buf: Vec::new(),
        entries: 0,
    };
    w.buf.extend_from_slice(&MAGIC);
    w.u32(VERSION);
    w.u8(kind_code(parts.kind));
    write_params(&mut w, &parts.params);
    write_info(&mut w, &parts.info);
    if let Some(a) = &parts.assignment {
        write_assignment(&mut w, a);
    }
    write_tz(&mut w, &parts.inner);
    match &parts.far {
        None => {}
        Some(FarTable::Exact(t)) => {
            w.len(t.len());
            for &d in t {
                w.u64(d);
            }
            w.entries += t.len();
        }
        Some(FarTable::Restricted(o)) => write_tz(&mut w, o),
    }
    match &file.labels {
        Some(l) => {
            w.u8(1);
            write_labels(&mut w, l);
        }
        None => w.u8(0),
    }
    let crc = crc32fast::hash(&w.buf);
    w.u32(crc);
    (w.buf, w.entries)
}

pub fn encode(file: &OracleFile) -> Vec<u8> {
    encode_counted(file).0
}

pub fn decode(bytes: &[u8]) -> Result<OracleFile, CodecError> {
    if bytes.len() < 4 {
        return Err(CodecError::Truncated);
    }
    if bytes[..4] != MAGIC {
        return Err(CodecError::BadMagic);
    }
    if bytes.len() < 12 {
        return Err(CodecError::Truncated);
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(CodecError::UnsupportedVersion(version));
    }
    let (body, trailer) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(trailer.try_into().unwrap());
    let computed = crc32fast::hash(body);
    if stored != computed {
        return Err(CodecError::Checksum { stored, computed });
    }
    let mut r = Reader { buf: body, pos: 8 };
    let kind = kind_from(r.u8()?)?;
    let params = read_params(&mut r, kind)?;
    let info = read_info(&mut r)?;
    let assignment = match kind {
        OracleKind::SmallK | OracleKind::NearLinear => Some(read_assignment(&mut r)?),
        _ => None,
    };
    let inner = read_tz(&mut r)?;
    let far = match kind {
        OracleKind::SmallK => {
            let cells = r.len(8)?;
            Some(FarTable::Exact((0..cells).map(|_| r.u64()).collect::<Result<Vec<_>, _>>()?))
        }
        OracleKind::NearLinear => Some(FarTable::Restricted(read_tz(&mut r)?)),
        _ => None,
    };
    let labels = match r.u8()? {
        0 => None,
        1 => Some(read_labels(&mut r, inner.vertex_count())?),
        b => return Err(malformed(format!("option tag {b}"))),
    };
    if r.pos != body.len() {
        return Err(malformed("trailing bytes before checksum"));
    }
    let oracle = CompositeOracle::from_parts(CompositeParts {
        kind,
        params,
        info,
        assignment,
        inner,
        far,
    })
    .map_err(|e| malformed(e.to_string()))?;
    Ok(OracleFile { oracle, labels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use adoracle_core::composite::{build_near_linear, build_plain, build_small_k, build_warmup};
    use adoracle_core::generators;
    use adoracle_core::NoopObserver;
    use proptest::prelude::*;

    fn all_kinds(seed: u64) -> Vec<CompositeOracle> {
        let g = generators::gnm(80, 300, 1..=40, seed);
        vec![
            build_plain(&g, 3, seed, &mut NoopObserver).unwrap(),
            build_warmup(&g, 2, Rational::new(1, 2), seed, &mut NoopObserver).unwrap(),
            build_small_k(&g, 6, seed, &mut NoopObserver).unwrap(),
            build_near_linear(&g, 100, ParamMode::ConstantC, seed, &mut NoopObserver).unwrap(),
        ]
    }

    #[test]
    fn round_trip_every_kind() {
        for o in all_kinds(3) {
            let file = OracleFile {
                labels: Some(LabelMap::identity(o.vertex_count())),
                oracle: o,
            };
            let (bytes, entries) = encode_counted(&file);
            assert_eq!(entries, file.oracle.storage().total());
            assert_eq!(decode(&bytes).unwrap(), file);
        }
    }

    #[test]
    fn rejects_damage() {
        let o = all_kinds(1).swap_remove(2);
        let bytes = encode(&OracleFile { oracle: o, labels: None });
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert_eq!(decode(&bad), Err(CodecError::BadMagic));
        let mut bad = bytes.clone();
        bad[4] = 9;
        assert_eq!(decode(&bad), Err(CodecError::UnsupportedVersion(9)));
        let mut bad = bytes.clone();
        let mid = bad.len() / 2;
        bad[mid] ^= 0x40;
        assert!(matches!(decode(&bad), Err(CodecError::Checksum { .. })));
        assert!(decode(&bytes[..bytes.len() - 1]).is_err());
        assert_eq!(decode(&bytes[..2]), Err(CodecError::Truncated));
    }

    #[test]
    fn truncated_body_with_valid_checksum() {
        let o = all_kinds(2).swap_remove(0);
        let bytes = encode(&OracleFile { oracle: o, labels: None });
        let mut body = bytes[..bytes.len() / 2].to_vec();
        let crc = crc32fast::hash(&body);
        body.extend_from_slice(&crc.to_le_bytes());
        assert_eq!(decode(&body), Err(CodecError::Truncated));
    }

    #[test]
    fn label_resolution() {
        let map = LabelMap {
            labels: vec![10, 20, 30],
            mapped: vec![Some(0), None, Some(1)],
            contracted: true,
            largest_component: true,
        };
        assert_eq!(map.resolve(30), Some(1));
        assert_eq!(map.resolve(20), None);
        assert_eq!(map.resolve(99), None);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn round_trip_preserves_queries(seed in 0u64..1000, n in 2usize..60, kind in 0usize..4) {
            let m = (n - 1 + n).min(n * (n - 1) / 2);
            let g = generators::gnm(n, m, 1..=20, seed);
            let o = match kind {
                0 => build_plain(&g, 2, seed, &mut NoopObserver).unwrap(),
                1 => build_warmup(&g, 2, Rational::new(1, 3), seed, &mut NoopObserver).unwrap(),
                2 => build_small_k(&g, 3, seed, &mut NoopObserver).unwrap(),
                _ => build_near_linear(&g, 3, ParamMode::ConstantC, seed, &mut NoopObserver).unwrap(),
            };
            let file = OracleFile { oracle: o, labels: None };
            let decoded = decode(&encode(&file)).unwrap();
            prop_assert_eq!(&decoded, &file);
            for u in 0..n {
                for v in 0..n {
                    prop_assert_eq!(decoded.oracle.query(u, v), file.oracle.query(u, v));
                }
            }
        }
    }
}
