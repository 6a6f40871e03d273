//! Glyph geometry: manifold locations and closed polyline outlines.

use crate::error::{Error, Result};

/// Location of a glyph on its character's 2D font manifold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManifoldPoint {
    pub x: f64,
    pub y: f64,
}

impl ManifoldPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "manifold point ({x}, {y}) is not finite"
            )));
        }
        Ok(Self { x, y })
    }

    pub fn distance(&self, other: &ManifoldPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl BoundingBox {
    pub fn width(&self) -> f64 {
        self.max[0] - self.min[0]
    }

    pub fn height(&self) -> f64 {
        self.max[1] - self.min[1]
    }
}

/// Closed polyline outline of a glyph. The last vertex connects back to the
/// first.
#[derive(Debug, Clone, PartialEq)]
pub struct GlyphOutline {
    vertices: Vec<[f64; 2]>,
}

impl GlyphOutline {
    pub fn new(vertices: Vec<[f64; 2]>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::DegenerateGeometry(format!(
                "outline has {} vertices, need at least 3",
                vertices.len()
            )));
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::DegenerateGeometry("non-finite vertex".into()));
        }
        let outline = Self { vertices };
        let bb = outline.bounding_box();
        if bb.width() <= 0.0 || bb.height() <= 0.0 {
            return Err(Error::DegenerateGeometry(
                "bounding box has zero area".into(),
            ));
        }
        Ok(outline)
    }

    /// Skips validation; callers guarantee finiteness. Used for noisy
    /// observations where the bounding box cannot collapse in practice.
    pub(crate) fn from_vertices_unchecked(vertices: Vec<[f64; 2]>) -> Self {
        Self { vertices }
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn bounding_box(&self) -> BoundingBox {
        let mut min = [f64::INFINITY; 2];
        let mut max = [f64::NEG_INFINITY; 2];
        for v in &self.vertices {
            for a in 0..2 {
                min[a] = min[a].min(v[a]);
                max[a] = max[a].max(v[a]);
            }
        }
        BoundingBox { min, max }
    }

    pub fn perimeter(&self) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| dist(self.vertices[i], self.vertices[(i + 1) % n]))
            .sum()
    }

    /// Affine per-axis map of this outline onto `target`.
    pub fn fit_to_box(&self, target: &BoundingBox) -> GlyphOutline {
        let src = self.bounding_box();
        let sx = target.width() / src.width();
        let sy = target.height() / src.height();
        let vertices = self
            .vertices
            .iter()
            .map(|v| {
                [
                    target.min[0] + (v[0] - src.min[0]) * sx,
                    target.min[1] + (v[1] - src.min[1]) * sy,
                ]
            })
            .collect();
        GlyphOutline { vertices }
    }

    /// Maps the outline onto the unit square.
    pub fn normalized(&self) -> GlyphOutline {
        self.fit_to_box(&BoundingBox {
            min: [0.0, 0.0],
            max: [1.0, 1.0],
        })
    }

    pub fn scaled(&self, sx: f64, sy: f64) -> GlyphOutline {
        GlyphOutline {
            vertices: self
                .vertices
                .iter()
                .map(|v| [v[0] * sx, v[1] * sy])
                .collect(),
        }
    }

    pub fn translated(&self, dx: f64, dy: f64) -> GlyphOutline {
        GlyphOutline {
            vertices: self
                .vertices
                .iter()
                .map(|v| [v[0] + dx, v[1] + dy])
                .collect(),
        }
    }

    /// Rounds every coordinate to six decimals, the precision of the text
    /// formats.
    pub fn quantized(&self) -> GlyphOutline {
        GlyphOutline {
            vertices: self
                .vertices
                .iter()
                .map(|v| [quantize(v[0]), quantize(v[1])])
                .collect(),
        }
    }
}

pub(crate) fn quantize(v: f64) -> f64 {
    let q = (v * 1e6).round() / 1e6;
    // Avoid writing "-0.000000".
    if q == 0.0 {
        0.0
    } else {
        q
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Resamples a closed outline to `target_count` vertices spaced uniformly by
/// arc length, starting at the first vertex.
pub fn resample_outline(outline: &GlyphOutline, target_count: usize) -> Result<GlyphOutline> {
    if target_count < 3 {
        return Err(Error::InvalidArgument(format!(
            "target vertex count {target_count} is below 3"
        )));
    }
    let v = outline.vertices();
    let n = v.len();
    let total = outline.perimeter();
    if total <= 0.0 || !total.is_finite() {
        return Err(Error::DegenerateGeometry("outline has zero length".into()));
    }
    let step = total / target_count as f64;
    let mut out = Vec::with_capacity(target_count);
    let mut seg = 0usize;
    let mut seg_start = 0.0;
    let mut seg_len = dist(v[0], v[1 % n]);
    for i in 0..target_count {
        let s = step * i as f64;
        while seg + 1 < n && s > seg_start + seg_len {
            seg_start += seg_len;
            seg += 1;
            seg_len = dist(v[seg], v[(seg + 1) % n]);
        }
        let a = v[seg];
        let b = v[(seg + 1) % n];
        let t = if seg_len > 0.0 {
            ((s - seg_start) / seg_len).clamp(0.0, 1.0)
        } else {
            0.0
        };
        out.push([a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t]);
    }
    Ok(GlyphOutline { vertices: out })
}

/// Vertex-wise L2 distance between `f` and `u` after mapping `u` onto the
/// bounding box of `f`.
pub fn outline_distance(f: &GlyphOutline, u: &GlyphOutline) -> Result<f64> {
    if f.vertex_count() != u.vertex_count() {
        return Err(Error::VertexCountMismatch {
            left: f.vertex_count(),
            right: u.vertex_count(),
        });
    }
    Ok(distance_to_box(f, u, &f.bounding_box()))
}

pub(crate) fn distance_to_box(f: &GlyphOutline, u: &GlyphOutline, fb: &BoundingBox) -> f64 {
    let ub = u.bounding_box();
    let sx = fb.width() / ub.width();
    let sy = fb.height() / ub.height();
    f.vertices
        .iter()
        .zip(&u.vertices)
        .map(|(a, b)| {
            let bx = fb.min[0] + (b[0] - ub.min[0]) * sx;
            let by = fb.min[1] + (b[1] - ub.min[1]) * sy;
            (a[0] - bx).powi(2) + (a[1] - by).powi(2)
        })
        .sum::<f64>()
        .sqrt()
}
