//! NIfTI-1 single-file (`.nii` / `.nii.gz`) reader and writer.
//!
//! Only the subset needed for registration evaluation is handled: 3D scalar
//! and label volumes, and 3-component displacement fields stored either as
//! `dim = [4, X, Y, Z, 3]` or `dim = [5, X, Y, Z, 1, 3]`. Both field layouts
//! keep the component as the slowest axis, so they decode to the same array.

use std::fs::File;
use std::io::{BufReader, BufWriter, Cursor, Read, Write};
use std::path::Path;

use byteorder::{BigEndian, ByteOrder, LittleEndian, ReadBytesExt, WriteBytesExt};
use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;

use crate::error::{Error, Result};
use crate::volume::{
    AffineHeader, DataType, Dims, DisplacementField, LabelVolume, ScalarVolume,
};

pub const HEADER_SIZE: usize = 348;
pub const MAGIC_NIP1: &[u8; 4] = b"n+1\0";
const VOX_OFFSET: usize = 352;
const INTENT_DISPVECT: i16 = 1006;
const NIFTI_UNITS_MM: u8 = 2;

/// Anything a NIfTI file may decode to.
#[derive(Debug, Clone, PartialEq)]
pub enum NiftiObject {
    Scalar(ScalarVolume),
    Label(LabelVolume),
    Field(DisplacementField),
}

impl NiftiObject {
    pub fn header(&self) -> &AffineHeader {
        match self {
            NiftiObject::Scalar(v) => &v.header,
            NiftiObject::Label(v) => &v.header,
            NiftiObject::Field(f) => &f.header,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            NiftiObject::Scalar(_) => "scalar volume",
            NiftiObject::Label(_) => "label volume",
            NiftiObject::Field(_) => "displacement field",
        }
    }

    pub fn into_scalar(self) -> Result<ScalarVolume> {
        match self {
            NiftiObject::Scalar(v) => Ok(v),
            NiftiObject::Label(l) => {
                let data = l.data.iter().map(|&x| f64::from(x)).collect();
                let mut v = ScalarVolume::new(l.header, data)?;
                v.datatype = l.datatype;
                Ok(v)
            }
            NiftiObject::Field(_) => Err(Error::InvalidHeader(
                "expected a scalar volume, found a displacement field".into(),
            )),
        }
    }

    pub fn into_labels(self) -> Result<LabelVolume> {
        match self {
            NiftiObject::Label(l) => Ok(l),
            other => Err(Error::InvalidHeader(format!(
                "expected an integer label volume, found a {}",
                other.kind()
            ))),
        }
    }

    pub fn into_field(self) -> Result<DisplacementField> {
        match self {
            NiftiObject::Field(f) => Ok(f),
            other => Err(Error::InvalidHeader(format!(
                "expected a displacement field, found a {}",
                other.kind()
            ))),
        }
    }
}

impl From<ScalarVolume> for NiftiObject {
    fn from(v: ScalarVolume) -> Self {
        NiftiObject::Scalar(v)
    }
}

impl From<LabelVolume> for NiftiObject {
    fn from(v: LabelVolume) -> Self {
        NiftiObject::Label(v)
    }
}

impl From<DisplacementField> for NiftiObject {
    fn from(v: DisplacementField) -> Self {
        NiftiObject::Field(v)
    }
}

/// The header fields this crate consumes.
#[derive(Debug, Clone, PartialEq)]
struct RawHeader {
    dim: [i16; 8],
    intent_code: i16,
    datatype: i16,
    pixdim: [f32; 8],
    vox_offset: f32,
    scl_slope: f32,
    scl_inter: f32,
    qform_code: i16,
    sform_code: i16,
    quatern: [f32; 3],
    qoffset: [f32; 3],
    srow: [[f32; 4]; 3],
}

fn parse_raw<B: ByteOrder>(bytes: &[u8]) -> Result<RawHeader> {
    let mut c = Cursor::new(bytes);
    let short = |e: std::io::Error| Error::InvalidHeader(e.to_string());

    let mut dim = [0i16; 8];
    c.set_position(40);
    for d in &mut dim {
        *d = c.read_i16::<B>().map_err(short)?;
    }
    c.set_position(68);
    let intent_code = c.read_i16::<B>().map_err(short)?;
    let datatype = c.read_i16::<B>().map_err(short)?;
    c.set_position(76);
    let mut pixdim = [0f32; 8];
    for p in &mut pixdim {
        *p = c.read_f32::<B>().map_err(short)?;
    }
    let vox_offset = c.read_f32::<B>().map_err(short)?;
    let scl_slope = c.read_f32::<B>().map_err(short)?;
    let scl_inter = c.read_f32::<B>().map_err(short)?;
    c.set_position(252);
    let qform_code = c.read_i16::<B>().map_err(short)?;
    let sform_code = c.read_i16::<B>().map_err(short)?;
    let mut quatern = [0f32; 3];
    for q in &mut quatern {
        *q = c.read_f32::<B>().map_err(short)?;
    }
    let mut qoffset = [0f32; 3];
    for q in &mut qoffset {
        *q = c.read_f32::<B>().map_err(short)?;
    }
    let mut srow = [[0f32; 4]; 3];
    for row in &mut srow {
        for v in row.iter_mut() {
            *v = c.read_f32::<B>().map_err(short)?;
        }
    }
    Ok(RawHeader {
        dim,
        intent_code,
        datatype,
        pixdim,
        vox_offset,
        scl_slope,
        scl_inter,
        qform_code,
        sform_code,
        quatern,
        qoffset,
        srow,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Volume,
    Field,
}

fn classify(dim: &[i16; 8]) -> Result<Layout> {
    let spatial_ok = dim[1..4].iter().all(|&d| d >= 1);
    if !spatial_ok {
        return Err(Error::UnsupportedLayout(*dim));
    }
    match (dim[0], dim[4], dim[5]) {
        (3, _, _) => Ok(Layout::Volume),
        (4, 1, _) => Ok(Layout::Volume),
        (4, 3, _) => Ok(Layout::Field),
        (5, 1, 3) => Ok(Layout::Field),
        _ => Err(Error::UnsupportedLayout(*dim)),
    }
}

fn quaternion_affine(raw: &RawHeader, spacing: [f64; 3]) -> [[f64; 4]; 4] {
    let [b, c, d] = raw.quatern.map(f64::from);
    let a = (1.0 - (b * b + c * c + d * d)).max(0.0).sqrt();
    let qfac = if raw.pixdim[0] < 0.0 { -1.0 } else { 1.0 };
    let r = [
        [a * a + b * b - c * c - d * d, 2.0 * (b * c - a * d), 2.0 * (b * d + a * c)],
        [2.0 * (b * c + a * d), a * a + c * c - b * b - d * d, 2.0 * (c * d - a * b)],
        [2.0 * (b * d - a * c), 2.0 * (c * d + a * b), a * a + d * d - c * c - b * b],
    ];
    let scale = [spacing[0], spacing[1], spacing[2] * qfac];
    let mut m = [[0.0; 4]; 4];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = r[i][j] * scale[j];
        }
        m[i][3] = f64::from(raw.qoffset[i]);
    }
    m[3][3] = 1.0;
    m
}

fn build_header(raw: &RawHeader) -> Result<AffineHeader> {
    let dims = Dims([raw.dim[1] as usize, raw.dim[2] as usize, raw.dim[3] as usize]);
    let spacing = [
        f64::from(raw.pixdim[1]).abs(),
        f64::from(raw.pixdim[2]).abs(),
        f64::from(raw.pixdim[3]).abs(),
    ];
    let affine = if raw.sform_code > 0 {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in raw.srow.iter().enumerate() {
            for j in 0..4 {
                m[i][j] = f64::from(row[j]);
            }
        }
        m[3][3] = 1.0;
        m
    } else if raw.qform_code > 0 {
        quaternion_affine(raw, spacing)
    } else {
        AffineHeader::new(dims, spacing).affine
    };
    let slope = f64::from(raw.scl_slope);
    let (scl_slope, scl_inter) = if slope.is_finite() && slope != 0.0 {
        (slope, f64::from(raw.scl_inter))
    } else {
        (1.0, 0.0)
    };
    let h = AffineHeader {
        dims,
        spacing,
        affine,
        scl_slope,
        scl_inter,
    };
    h.validate()?;
    Ok(h)
}

fn decode_samples<B: ByteOrder>(payload: &[u8], dt: DataType, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    match dt {
        DataType::UInt8 => out.extend(payload[..count].iter().map(|&b| f64::from(b))),
        DataType::Int16 => {
            out.extend(payload.chunks_exact(2).take(count).map(|c| f64::from(B::read_i16(c))))
        }
        DataType::Int32 => {
            out.extend(payload.chunks_exact(4).take(count).map(|c| f64::from(B::read_i32(c))))
        }
        DataType::Float32 => {
            out.extend(payload.chunks_exact(4).take(count).map(|c| f64::from(B::read_f32(c))))
        }
        DataType::Float64 => out.extend(payload.chunks_exact(8).take(count).map(B::read_f64)),
    }
    out
}

fn decode<B: ByteOrder>(bytes: &[u8]) -> Result<NiftiObject> {
    let raw = parse_raw::<B>(bytes)?;
    let datatype = DataType::from_code(raw.datatype)?;
    let layout = classify(&raw.dim)?;
    let header = build_header(&raw)?;
    let n = header.dims.len();
    let components = if layout == Layout::Field { 3 } else { 1 };
    if layout == Layout::Field && !datatype.is_float() {
        return Err(Error::UnsupportedLayout(raw.dim));
    }

    let offset = raw.vox_offset as usize;
    if !(raw.vox_offset.is_finite() && offset >= HEADER_SIZE) {
        return Err(Error::InvalidHeader(format!(
            "vox_offset {} precedes the end of the header",
            raw.vox_offset
        )));
    }
    let expected = n * components * datatype.bytes();
    let found = bytes.len().saturating_sub(offset);
    if found < expected {
        return Err(Error::TruncatedPayload { expected, found });
    }
    let mut values = decode_samples::<B>(&bytes[offset..], datatype, n * components);

    let scaled = header.scl_slope != 1.0 || header.scl_inter != 0.0;
    if scaled {
        let (s, b) = (header.scl_slope, header.scl_inter);
        for v in &mut values {
            *v = *v * s + b;
        }
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteData(i % n));
    }

    match layout {
        Layout::Field => {
            let data = (0..n)
                .map(|i| [values[i], values[n + i], values[2 * n + i]])
                .collect();
            let mut f = DisplacementField::new(header, data)?;
            f.datatype = datatype;
            Ok(NiftiObject::Field(f))
        }
        Layout::Volume if datatype.is_float() || scaled => {
            let mut v = ScalarVolume::new(header, values)?;
            v.datatype = datatype;
            Ok(NiftiObject::Scalar(v))
        }
        Layout::Volume => {
            let mut data = Vec::with_capacity(n);
            for (i, &v) in values.iter().enumerate() {
                if v < 0.0 {
                    return Err(Error::InvalidLabel { index: i, value: v });
                }
                data.push(v as u32);
            }
            let mut l = LabelVolume::new(header, data)?;
            l.datatype = datatype;
            Ok(NiftiObject::Label(l))
        }
    }
}

/// Decodes an in-memory file image, gzip-compressed or raw.
pub fn decode_nifti(bytes: &[u8]) -> Result<NiftiObject> {
    if bytes.len() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b {
        let mut plain = Vec::new();
        GzDecoder::new(bytes)
            .read_to_end(&mut plain)
            .map_err(|e| Error::BadMagic(format!("corrupt gzip stream: {e}")))?;
        return decode_plain(&plain);
    }
    decode_plain(bytes)
}

fn decode_plain(bytes: &[u8]) -> Result<NiftiObject> {
    if bytes.len() < HEADER_SIZE {
        return Err(Error::BadMagic(format!(
            "file is {} bytes, shorter than a NIfTI-1 header",
            bytes.len()
        )));
    }
    let little = LittleEndian::read_i32(&bytes[0..4]) == HEADER_SIZE as i32;
    let big = BigEndian::read_i32(&bytes[0..4]) == HEADER_SIZE as i32;
    if !little && !big {
        return Err(Error::BadMagic("sizeof_hdr is not 348".into()));
    }
    if &bytes[344..348] != MAGIC_NIP1 {
        return Err(Error::BadMagic(format!(
            "magic {:?} is not \"n+1\"",
            &bytes[344..348]
        )));
    }
    if little {
        decode::<LittleEndian>(bytes)
    } else {
        decode::<BigEndian>(bytes)
    }
}

pub fn read_nifti(path: impl AsRef<Path>) -> Result<NiftiObject> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|f| BufReader::new(f).read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    decode_nifti(&bytes)
}

fn header_bytes(
    h: &AffineHeader,
    datatype: DataType,
    field: bool,
) -> std::io::Result<Vec<u8>> {
    let mut buf = Vec::with_capacity(VOX_OFFSET);
    buf.write_i32::<LittleEndian>(HEADER_SIZE as i32)?;
    buf.extend_from_slice(&[0u8; 35]); // data_type .. regular
    buf.push(0); // dim_info
    let d = h.dims.0;
    let dim: [i16; 8] = if field {
        [5, d[0] as i16, d[1] as i16, d[2] as i16, 1, 3, 1, 1]
    } else {
        [3, d[0] as i16, d[1] as i16, d[2] as i16, 1, 1, 1, 1]
    };
    for v in dim {
        buf.write_i16::<LittleEndian>(v)?;
    }
    for _ in 0..3 {
        buf.write_f32::<LittleEndian>(0.0)?; // intent_p1..3
    }
    buf.write_i16::<LittleEndian>(if field { INTENT_DISPVECT } else { 0 })?;
    buf.write_i16::<LittleEndian>(datatype.code())?;
    buf.write_i16::<LittleEndian>((datatype.bytes() * 8) as i16)?;
    buf.write_i16::<LittleEndian>(0)?; // slice_start
    let pixdim = [
        1.0,
        h.spacing[0] as f32,
        h.spacing[1] as f32,
        h.spacing[2] as f32,
        1.0,
        1.0,
        1.0,
        1.0,
    ];
    for v in pixdim {
        buf.write_f32::<LittleEndian>(v)?;
    }
    buf.write_f32::<LittleEndian>(VOX_OFFSET as f32)?;
    buf.write_f32::<LittleEndian>(h.scl_slope as f32)?;
    buf.write_f32::<LittleEndian>(h.scl_inter as f32)?;
    buf.write_i16::<LittleEndian>(0)?; // slice_end
    buf.push(0); // slice_code
    buf.push(NIFTI_UNITS_MM);
    buf.extend_from_slice(&[0u8; 24]); // cal_max .. glmin
    let mut descrip = [0u8; 80];
    let text = b"regeval";
    descrip[..text.len()].copy_from_slice(text);
    buf.extend_from_slice(&descrip);
    buf.extend_from_slice(&[0u8; 24]); // aux_file
    buf.write_i16::<LittleEndian>(0)?; // qform_code
    buf.write_i16::<LittleEndian>(1)?; // sform_code
    for _ in 0..6 {
        buf.write_f32::<LittleEndian>(0.0)?; // quatern_b..qoffset_z
    }
    for row in &h.affine[..3] {
        for &v in row {
            buf.write_f32::<LittleEndian>(v as f32)?;
        }
    }
    buf.extend_from_slice(&[0u8; 16]); // intent_name
    buf.extend_from_slice(MAGIC_NIP1);
    debug_assert_eq!(buf.len(), HEADER_SIZE);
    buf.extend_from_slice(&[0u8; 4]); // no extensions
    Ok(buf)
}

fn raw_value(v: f64, h: &AffineHeader) -> f64 {
    if h.scl_slope != 1.0 || h.scl_inter != 0.0 {
        (v - h.scl_inter) / h.scl_slope
    } else {
        v
    }
}

fn encode_samples(
    values: impl Iterator<Item = f64>,
    dt: DataType,
    out: &mut Vec<u8>,
) -> Result<()> {
    let range = |lo: f64, hi: f64, v: f64| -> Result<f64> {
        let r = v.round();
        if r < lo || r > hi {
            Err(Error::ValueOutOfRange {
                value: v,
                datatype: dt.name(),
            })
        } else {
            Ok(r)
        }
    };
    for v in values {
        match dt {
            DataType::UInt8 => out.push(range(0.0, 255.0, v)? as u8),
            DataType::Int16 => {
                let r = range(f64::from(i16::MIN), f64::from(i16::MAX), v)?;
                out.extend_from_slice(&(r as i16).to_le_bytes());
            }
            DataType::Int32 => {
                let r = range(f64::from(i32::MIN), f64::from(i32::MAX), v)?;
                out.extend_from_slice(&(r as i32).to_le_bytes());
            }
            DataType::Float32 => out.extend_from_slice(&(v as f32).to_le_bytes()),
            DataType::Float64 => out.extend_from_slice(&v.to_le_bytes()),
        }
    }
    Ok(())
}

/// Serializes to an uncompressed NIfTI-1 byte image (little-endian, sform set).
pub fn encode_nifti(obj: &NiftiObject) -> Result<Vec<u8>> {
    let io = |e: std::io::Error| Error::io("<memory>", e);
    match obj {
        NiftiObject::Scalar(v) => {
            v.header.validate()?;
            let mut buf = header_bytes(&v.header, v.datatype, false).map_err(io)?;
            buf.reserve(v.data.len() * v.datatype.bytes());
            encode_samples(
                v.data.iter().map(|&x| raw_value(x, &v.header)),
                v.datatype,
                &mut buf,
            )?;
            Ok(buf)
        }
        NiftiObject::Label(l) => {
            l.header.validate()?;
            // Labels are stored unscaled.
            let mut h = l.header.clone();
            h.scl_slope = 1.0;
            h.scl_inter = 0.0;
            let mut buf = header_bytes(&h, l.datatype, false).map_err(io)?;
            buf.reserve(l.data.len() * l.datatype.bytes());
            encode_samples(l.data.iter().map(|&x| f64::from(x)), l.datatype, &mut buf)?;
            Ok(buf)
        }
        NiftiObject::Field(f) => {
            f.header.validate()?;
            let dt = if f.datatype.is_float() {
                f.datatype
            } else {
                DataType::Float32
            };
            let mut h = f.header.clone();
            h.scl_slope = 1.0;
            h.scl_inter = 0.0;
            let mut buf = header_bytes(&h, dt, true).map_err(io)?;
            buf.reserve(f.data.len() * 3 * dt.bytes());
            for c in 0..3 {
                encode_samples(f.data.iter().map(|u| u[c]), dt, &mut buf)?;
            }
            Ok(buf)
        }
    }
}

pub fn write_nifti(obj: &NiftiObject, path: impl AsRef<Path>, gzip: bool) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_nifti(obj)?;
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let res = if gzip {
        let mut enc = GzEncoder::new(&mut w, Compression::fast());
        enc.write_all(&bytes).and_then(|_| enc.finish().map(|_| ()))
    } else {
        w.write_all(&bytes)
    };
    res.and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

/// True when the path ends in `.gz`.
pub fn wants_gzip(path: impl AsRef<Path>) -> bool {
    path.as_ref()
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("gz"))
}


#[cfg(test)]
mod tests {
    use super::test_support::craft;
    use super::*;

    fn f32_payload(values: impl Iterator<Item = f32>) -> Vec<u8> {
        values.flat_map(|v| v.to_le_bytes()).collect()
    }

    #[test]
    fn crafted_float_volume_x_fastest() {
        let mut bytes = craft([3, 2, 2, 2, 1, 1, 1, 1], 16, [1.0; 3]);
        bytes.extend(f32_payload((0..8).map(|v| v as f32)));
        let v = decode_nifti(&bytes).unwrap().into_scalar().unwrap();
        assert_eq!(v.data, (0..8).map(f64::from).collect::<Vec<_>>());
        assert_eq!(v.at(1, 0, 0), 1.0);
        assert_eq!(v.at(0, 1, 0), 2.0);
        assert_eq!(v.at(0, 0, 1), 4.0);
    }

    #[test]
    fn gzip_container_is_transparent() {
        let mut bytes = craft([3, 2, 2, 2, 1, 1, 1, 1], 16, [1.0; 3]);
        bytes.extend(f32_payload((0..8).map(|v| v as f32)));
        let mut enc = GzEncoder::new(Vec::new(), Compression::default());
        enc.write_all(&bytes).unwrap();
        let gz = enc.finish().unwrap();
        assert_eq!(decode_nifti(&gz).unwrap(), decode_nifti(&bytes).unwrap());
    }

    #[test]
    fn zero_field_in_5d_layout_is_identity() {
        let mut bytes = craft([5, 4, 4, 4, 1, 3, 1, 1], 16, [1.0; 3]);
        bytes.extend(f32_payload(std::iter::repeat_n(0.0, 64 * 3)));
        let f = decode_nifti(&bytes).unwrap().into_field().unwrap();
        assert_eq!(f, DisplacementField::identity(f.header.clone()));
    }

    #[test]
    fn integer_types_become_labels() {
        for (code, width) in [(2i16, 1usize), (4, 2), (8, 4)] {
            let mut bytes = craft([3, 2, 1, 1, 1, 1, 1, 1], code, [1.0; 3]);
            let mut payload = vec![0u8; 2 * width];
            payload[width] = 7;
            bytes.extend(payload);
            let l = decode_nifti(&bytes).unwrap().into_labels().unwrap();
            assert_eq!(l.data, vec![0, 7]);
        }
    }

    #[test]
    fn scaling_is_applied() {
        let mut bytes = craft([3, 2, 1, 1, 1, 1, 1, 1], 16, [1.0; 3]);
        LittleEndian::write_f32(&mut bytes[112..], 2.0);
        LittleEndian::write_f32(&mut bytes[116..], 1.0);
        bytes.extend(f32_payload([1.0, 3.0].into_iter()));
        let v = decode_nifti(&bytes).unwrap().into_scalar().unwrap();
        assert_eq!(v.data, vec![3.0, 7.0]);
    }

    #[test]
    fn bad_magic_and_truncation() {
        let mut bytes = craft([3, 2, 2, 2, 1, 1, 1, 1], 16, [1.0; 3]);
        bytes.extend(f32_payload((0..8).map(|v| v as f32)));
        let mut corrupt = bytes.clone();
        corrupt[345] = b'x';
        assert!(matches!(decode_nifti(&corrupt), Err(Error::BadMagic(_))));
        let short = &bytes[..bytes.len() - 3];
        assert!(matches!(
            decode_nifti(short),
            Err(Error::TruncatedPayload { expected: 32, found: 29 })
        ));
    }

    #[test]
    fn unsupported_datatype_and_layout() {
        let bytes = craft([3, 2, 2, 2, 1, 1, 1, 1], 512, [1.0; 3]);
        assert!(matches!(
            decode_nifti(&bytes),
            Err(Error::UnsupportedDatatype(512))
        ));
        let bytes = craft([4, 2, 2, 2, 2, 1, 1, 1], 16, [1.0; 3]);
        assert!(matches!(decode_nifti(&bytes), Err(Error::UnsupportedLayout(_))));
        // A 3-vector layout with integer payload is never read as labels.
        let mut bytes = craft([4, 2, 2, 2, 3, 1, 1, 1], 4, [1.0; 3]);
        bytes.extend(vec![0u8; 8 * 3 * 2]);
        assert!(matches!(decode_nifti(&bytes), Err(Error::UnsupportedLayout(_))));
    }

    #[test]
    fn nan_payload_is_rejected() {
        let mut bytes = craft([3, 2, 1, 1, 1, 1, 1, 1], 16, [1.0; 3]);
        bytes.extend(f32_payload([0.0, f32::NAN].into_iter()));
        assert!(matches!(decode_nifti(&bytes), Err(Error::NonFiniteData(1))));
    }

    #[test]
    fn big_endian_header_is_accepted() {
        let mut b = vec![0u8; VOX_OFFSET];
        BigEndian::write_i32(&mut b[0..4], 348);
        for (i, d) in [3i16, 2, 1, 1, 1, 1, 1, 1].iter().enumerate() {
            BigEndian::write_i16(&mut b[40 + 2 * i..], *d);
        }
        BigEndian::write_i16(&mut b[70..], 4);
        for i in 0..4 {
            BigEndian::write_f32(&mut b[76 + 4 * i..], 1.0);
        }
        BigEndian::write_f32(&mut b[108..], VOX_OFFSET as f32);
        b[344..348].copy_from_slice(MAGIC_NIP1);
        b.extend_from_slice(&[0, 5, 1, 0]);
        let l = decode_nifti(&b).unwrap().into_labels().unwrap();
        assert_eq!(l.data, vec![5, 256]);
    }

    #[test]
    fn sform_is_preserved() {
        let mut h = AffineHeader::new(Dims::new(2, 3, 4), [0.5, 1.0, 2.0]);
        h.affine[0][3] = -10.0;
        h.affine[1][3] = 4.25;
        let v = ScalarVolume::zeros(h.clone());
        let back = decode_nifti(&encode_nifti(&v.into()).unwrap()).unwrap();
        assert_eq!(back.header(), &h);
    }
}
