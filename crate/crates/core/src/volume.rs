//! Grid-backed data: scalar images, label maps, displacement and velocity fields.
//!
//! All arrays are stored flat in x-fastest order, matching the on-disk NIfTI
//! layout. Displacements and velocities are expressed in voxels of the grid
//! they live on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grid extent in voxels along x, y, z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims(pub [usize; 3]);

impl Dims {
    pub fn new(nx: usize, ny: usize, nz: usize) -> Self {
        Dims([nx, ny, nz])
    }

    pub fn cube(n: usize) -> Self {
        Dims([n, n, n])
    }

    #[inline]
    pub fn nx(&self) -> usize {
        self.0[0]
    }

    #[inline]
    pub fn ny(&self) -> usize {
        self.0[1]
    }

    #[inline]
    pub fn nz(&self) -> usize {
        self.0[2]
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0[0] * self.0[1] * self.0[2]
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Voxels per z-slice; the chunk size used by parallel kernels.
    #[inline]
    pub fn slice_len(&self) -> usize {
        self.0[0] * self.0[1]
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        x + self.0[0] * (y + self.0[1] * z)
    }

    #[inline]
    pub fn coords(&self, i: usize) -> [usize; 3] {
        let nx = self.0[0];
        let ny = self.0[1];
        [i % nx, (i / nx) % ny, i / (nx * ny)]
    }

    /// True when the continuous coordinate lies within `[0, n-1]` on every axis.
    #[inline]
    pub fn contains_point(&self, p: [f64; 3]) -> bool {
        (0..3).all(|a| p[a] >= 0.0 && p[a] <= (self.0[a] - 1) as f64)
    }

    /// Halved extent used by the registration pyramid.
    pub fn halved(&self) -> Dims {
        Dims([
            self.0[0].div_ceil(2),
            self.0[1].div_ceil(2),
            self.0[2].div_ceil(2),
        ])
    }
}

/// On-disk sample type. Kept on every object so that a write reproduces the
/// type that was read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DataType {
    UInt8,
    Int16,
    Int32,
    Float32,
    Float64,
}

impl DataType {
    pub fn code(self) -> i16 {
        match self {
            DataType::UInt8 => 2,
            DataType::Int16 => 4,
            DataType::Int32 => 8,
            DataType::Float32 => 16,
            DataType::Float64 => 64,
        }
    }

    pub fn from_code(code: i16) -> Result<Self> {
        Ok(match code {
            2 => DataType::UInt8,
            4 => DataType::Int16,
            8 => DataType::Int32,
            16 => DataType::Float32,
            64 => DataType::Float64,
            other => return Err(Error::UnsupportedDatatype(other)),
        })
    }

    pub fn bytes(self) -> usize {
        match self {
            DataType::UInt8 => 1,
            DataType::Int16 => 2,
            DataType::Int32 | DataType::Float32 => 4,
            DataType::Float64 => 8,
        }
    }

    pub fn is_float(self) -> bool {
        matches!(self, DataType::Float32 | DataType::Float64)
    }

    pub fn name(self) -> &'static str {
        match self {
            DataType::UInt8 => "uint8",
            DataType::Int16 => "int16",
            DataType::Int32 => "int32",
            DataType::Float32 => "float32",
            DataType::Float64 => "float64",
        }
    }
}

/// Geometry shared by every grid object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineHeader {
    pub dims: Dims,
    /// mm per voxel.
    pub spacing: [f64; 3],
    /// Voxel-to-world matrix in mm.
    pub affine: [[f64; 4]; 4],
    pub scl_slope: f64,
    pub scl_inter: f64,
}

impl AffineHeader {
    /// Axis-aligned header with the voxel-to-world matrix `diag(spacing)`.
    pub fn new(dims: Dims, spacing: [f64; 3]) -> Self {
        let mut affine = [[0.0; 4]; 4];
        for a in 0..3 {
            affine[a][a] = spacing[a];
        }
        affine[3][3] = 1.0;
        AffineHeader {
            dims,
            spacing,
            affine,
            scl_slope: 1.0,
            scl_inter: 0.0,
        }
    }

    pub fn isotropic(dims: Dims) -> Self {
        Self::new(dims, [1.0; 3])
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.0.contains(&0) {
            return Err(Error::InvalidHeader(format!(
                "zero-sized dimension {:?}",
                self.dims.0
            )));
        }
        if self.spacing.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::InvalidHeader(format!(
                "spacing must be positive and finite, got {:?}",
                self.spacing
            )));
        }
        let m = &self.affine;
        let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        if det == 0.0 || !det.is_finite() {
            return Err(Error::InvalidHeader(
                "voxel-to-world matrix is singular".into(),
            ));
        }
        Ok(())
    }

    /// Length of the grid diagonal between the first and last voxel centers, mm.
    pub fn diagonal_mm(&self) -> f64 {
        (0..3)
            .map(|a| {
                let d = (self.dims.0[a] - 1) as f64 * self.spacing[a];
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }

    pub(crate) fn same_grid(&self, other: &AffineHeader) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::DimMismatch(self.dims.0, other.dims.0));
        }
        Ok(())
    }
}

fn check_len(dims: Dims, found: usize) -> Result<()> {
    if dims.len() != found {
        return Err(Error::LengthMismatchData {
            expected: dims.len(),
            found,
        });
    }
    Ok(())
}

/// Intensity image.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarVolume {
    pub header: AffineHeader,
    pub data: Vec<f64>,
    pub datatype: DataType,
}

impl ScalarVolume {
    pub fn new(header: AffineHeader, data: Vec<f64>) -> Result<Self> {
        header.validate()?;
        check_len(header.dims, data.len())?;
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteData(i));
        }
        Ok(ScalarVolume {
            header,
            data,
            datatype: DataType::Float32,
        })
    }

    pub fn from_fn(header: AffineHeader, f: impl Fn([usize; 3]) -> f64) -> Result<Self> {
        let dims = header.dims;
        let data = (0..dims.len()).map(|i| f(dims.coords(i))).collect();
        Self::new(header, data)
    }

    pub fn zeros(header: AffineHeader) -> Self {
        let n = header.dims.len();
        ScalarVolume {
            header,
            data: vec![0.0; n],
            datatype: DataType::Float32,
        }
    }

    #[inline]
    pub fn dims(&self) -> Dims {
        self.header.dims
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize, z: usize) -> f64 {
        self.data[self.header.dims.index(x, y, z)]
    }
}

/// Integer label map; 0 is background.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelVolume {
    pub header: AffineHeader,
    pub data: Vec<u32>,
    pub datatype: DataType,
}

impl LabelVolume {
    pub fn new(header: AffineHeader, data: Vec<u32>) -> Result<Self> {
        header.validate()?;
        check_len(header.dims, data.len())?;
        Ok(LabelVolume {
            header,
            data,
            datatype: DataType::Int16,
        })
    }

    pub fn from_fn(header: AffineHeader, f: impl Fn([usize; 3]) -> u32) -> Result<Self> {
        let dims = header.dims;
        let data = (0..dims.len()).map(|i| f(dims.coords(i))).collect();
        Self::new(header, data)
    }

    #[inline]
    pub fn dims(&self) -> Dims {
        self.header.dims
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize, z: usize) -> u32 {
        self.data[self.header.dims.index(x, y, z)]
    }

    /// Sorted distinct nonzero labels.
    pub fn labels(&self) -> Vec<u32> {
        let mut seen = std::collections::BTreeSet::new();
        for &l in &self.data {
            if l != 0 {
                seen.insert(l);
            }
        }
        seen.into_iter().collect()
    }

    /// Foreground mask (every nonzero label becomes 1).
    pub fn foreground(&self) -> LabelVolume {
        LabelVolume {
            header: self.header.clone(),
            data: self.data.iter().map(|&l| u32::from(l != 0)).collect(),
            datatype: DataType::UInt8,
        }
    }

    pub fn count_nonzero(&self) -> usize {
        self.data.iter().filter(|&&l| l != 0).count()
    }
}

/// Per-voxel displacement `u`, in voxels; `phi(x) = x + u(x)` maps fixed-grid
/// coordinates into the moving image.
#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementField {
    pub header: AffineHeader,
    pub data: Vec<[f64; 3]>,
    pub datatype: DataType,
}

impl DisplacementField {
    pub fn new(header: AffineHeader, data: Vec<[f64; 3]>) -> Result<Self> {
        header.validate()?;
        check_len(header.dims, data.len())?;
        if let Some(i) = data.iter().position(|v| v.iter().any(|c| !c.is_finite())) {
            return Err(Error::NonFiniteData(i));
        }
        Ok(DisplacementField {
            header,
            data,
            datatype: DataType::Float32,
        })
    }

    /// The identity transform (`u = 0`).
    pub fn identity(header: AffineHeader) -> Self {
        let n = header.dims.len();
        DisplacementField {
            header,
            data: vec![[0.0; 3]; n],
            datatype: DataType::Float32,
        }
    }

    pub fn constant(header: AffineHeader, t: [f64; 3]) -> Self {
        let n = header.dims.len();
        DisplacementField {
            header,
            data: vec![t; n],
            datatype: DataType::Float32,
        }
    }

    pub fn from_fn(header: AffineHeader, f: impl Fn([usize; 3]) -> [f64; 3]) -> Result<Self> {
        let dims = header.dims;
        let data = (0..dims.len()).map(|i| f(dims.coords(i))).collect();
        Self::new(header, data)
    }

    #[inline]
    pub fn dims(&self) -> Dims {
        self.header.dims
    }

    /// Converts a field stored in mm into voxel units of this grid.
    pub fn mm_to_voxels(mut self) -> Self {
        let s = self.header.spacing;
        for u in &mut self.data {
            for a in 0..3 {
                u[a] /= s[a];
            }
        }
        self
    }

    pub fn voxels_to_mm(mut self) -> Self {
        let s = self.header.spacing;
        for u in &mut self.data {
            for a in 0..3 {
                u[a] *= s[a];
            }
        }
        self
    }

    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|u| norm3(*u)).fold(0.0, f64::max)
    }
}

/// Stationary velocity field, voxel units per unit time.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityField {
    pub header: AffineHeader,
    pub data: Vec<[f64; 3]>,
}

impl VelocityField {
    pub fn new(header: AffineHeader, data: Vec<[f64; 3]>) -> Result<Self> {
        header.validate()?;
        check_len(header.dims, data.len())?;
        if data.iter().any(|v| v.iter().any(|c| !c.is_finite())) {
            return Err(Error::NonFiniteVelocity);
        }
        Ok(VelocityField { header, data })
    }

    pub fn zeros(header: AffineHeader) -> Self {
        let n = header.dims.len();
        VelocityField {
            header,
            data: vec![[0.0; 3]; n],
        }
    }

    pub fn negated(&self) -> VelocityField {
        VelocityField {
            header: self.header.clone(),
            data: self.data.iter().map(|v| [-v[0], -v[1], -v[2]]).collect(),
        }
    }

    pub fn scaled(&self, s: f64) -> VelocityField {
        VelocityField {
            header: self.header.clone(),
            data: self.data.iter().map(|v| [v[0] * s, v[1] * s, v[2] * s]).collect(),
        }
    }

    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|u| norm3(*u)).fold(0.0, f64::max)
    }

    #[inline]
    pub fn dims(&self) -> Dims {
        self.header.dims
    }
}

#[inline]
pub fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}
