//! Model sets: lattice points of `Z^n + γ` whose internal image falls in
//! a window, projected to physical space.

mod scheme;
mod window;

pub use scheme::{ProjectionScheme, SchemeDescriptor, SchemeKind, TorusParameter, WindowDescriptor};
pub use window::Window;

use nalgebra::DMatrix;
use num_rational::Rational64;

use crate::algebra::{hermite_normal_form, module_contains, Cyclo};
use crate::error::{Error, Result};
use crate::pattern::{Pattern, Point, Region};
use window::FLOAT_MARGIN;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ParameterClass {
    Regular,
    Singular,
}

/// Reduce `t` modulo `Z^n` into `[0, 1)^n`.
pub fn torus_reduce(scheme: &ProjectionScheme, t: &TorusParameter) -> Result<TorusParameter> {
    check_len(scheme, t)?;
    Ok(match t {
        TorusParameter::Exact(v) => TorusParameter::Exact(v.iter().map(|r| r - r.floor()).collect()),
        TorusParameter::Float(v) => TorusParameter::Float(
            v.iter()
                .map(|x| {
                    let f = x - x.floor();
                    if f >= 1.0 {
                        0.0
                    } else {
                        f
                    }
                })
                .collect(),
        ),
    })
}

fn check_len(scheme: &ProjectionScheme, t: &TorusParameter) -> Result<()> {
    if t.len() != scheme.n {
        return Err(Error::invalid(format!(
            "torus parameter has {} entries, scheme needs {}",
            t.len(),
            scheme.n
        )));
    }
    Ok(())
}

/// Height offset `Σγ` (must be an integer for height-indexed schemes).
fn height_offset(scheme: &ProjectionScheme, gamma: &TorusParameter) -> Result<i64> {
    if !scheme.has_height {
        return Ok(0);
    }
    let h = match gamma {
        TorusParameter::Exact(v) => {
            let s: Rational64 = v.iter().sum();
            if !s.is_integer() {
                return Err(Error::invalid("sum of offset coordinates must be an integer for this scheme"));
            }
            s.to_integer()
        }
        TorusParameter::Float(v) => {
            let s: f64 = v.iter().sum();
            if (s - s.round()).abs() > 1e-9 {
                return Err(Error::invalid("sum of offset coordinates must be an integer for this scheme"));
            }
            s.round() as i64
        }
    };
    Ok(h)
}

/// Singular iff some point of `Z^n + γ` has internal image exactly on the
/// boundary of its class window.
///
/// Exact offsets are scaled by their common denominator `D`; each
/// boundary feature then becomes an integer linear system `A x = r`
/// (coefficients of the ring value, plus the height), solvable over `Z`
/// iff `r` lies in the column module of `A`. For a polygon edge the
/// solution set projects to a rank ≥ 2 subgroup of the edge line, hence
/// is dense there and meets the edge itself. Float offsets are regular by
/// convention.
pub fn classify_parameter(scheme: &ProjectionScheme, gamma: &TorusParameter) -> Result<ParameterClass> {
    check_len(scheme, gamma)?;
    let TorusParameter::Exact(v) = gamma else {
        return Ok(ParameterClass::Regular);
    };
    let h0 = height_offset(scheme, gamma)?;
    let (_, frac, den) = TorusParameter::split_exact(v);
    let n = scheme.n;
    for (class, w) in &scheme.windows {
        if w.is_empty() {
            continue;
        }
        // Each feature contributes (coefficient functional per basis vector, target).
        let features: Vec<(Vec<[i64; 2]>, [i64; 2])> = match w {
            Window::Interval { lo, hi } => [lo, hi]
                .iter()
                .map(|e| {
                    let f = scheme.internal_exact.iter().map(|c| [c[0], c[1]]).collect();
                    (f, **e)
                })
                .collect(),
            Window::Polygon { order, vertices, .. } => {
                let m = vertices.len();
                (0..m)
                    .map(|i| {
                        let e = (vertices[(i + 1) % m] - vertices[i]).conj();
                        let f = scheme.internal_exact.iter().map(|c| (e * Cyclo::new(*order, *c)).im_scaled()).collect();
                        (f, (e * vertices[i]).im_scaled())
                    })
                    .collect()
            }
        };
        for (f, target) in features {
            // Σ_j (frac_j + D x_j) f_j = D·target  ⇒  Σ_j x_j (D f_j) = D·target − Σ frac_j f_j
            let mut cols: Vec<Vec<i64>> = Vec::with_capacity(n);
            for fj in &f {
                let mut col = vec![den * fj[0], den * fj[1]];
                if scheme.has_height {
                    col.push(den);
                }
                cols.push(col);
            }
            let mut rhs = vec![den * target[0], den * target[1]];
            for k in 0..2 {
                rhs[k] -= frac.iter().zip(&f).map(|(g, fj)| g * fj[k]).sum::<i64>();
            }
            if scheme.has_height {
                // height of x + γ is Σx + h0
                rhs.push(den * (class - h0));
            }
            let h = hermite_normal_form(&cols);
            if module_contains(&h, &rhs) {
                if matches!(w, Window::Polygon { .. }) && n - kernel_rank_complement(&cols) < 2 {
                    return Err(Error::Unsupported(
                        "edge incidence set is not dense for this window; cannot classify".into(),
                    ));
                }
                return Ok(ParameterClass::Singular);
            }
        }
    }
    Ok(ParameterClass::Regular)
}

/// Rank of the map `x ↦ Σ x_j col_j`.
fn kernel_rank_complement(cols: &[Vec<i64>]) -> usize {
    let m = cols[0].len();
    let rows: Vec<Vec<i64>> = (0..m).map(|k| cols.iter().map(|c| c[k]).collect()).collect();
    hermite_normal_form(&rows).len()
}

/// All points `P(x + γ)`, `x ∈ Z^n`, with `P_int(x + γ)` in the window of
/// its class and `P(x + γ)` in `region`.
///
/// Lattice candidates are enumerated from an interval-arithmetic bounding
/// box: the first `d` coordinates range over the preimage of region ×
/// window box, the remaining ones are solved from the internal (and
/// height) box for each choice, so the enumeration is exhaustive and
/// costs O(region volume). Membership is decided in floats when the point
/// is clear of the boundary and exactly otherwise (exact offsets only).
pub fn generate(scheme: &ProjectionScheme, gamma: &TorusParameter, region: &Region) -> Result<Pattern> {
    check_len(scheme, gamma)?;
    if region.dim() != scheme.d {
        return Err(Error::invalid(format!(
            "region dimension {} does not match physical dimension {}",
            region.dim(),
            scheme.d
        )));
    }
    let h0 = height_offset(scheme, gamma)?;
    let singular = classify_parameter(scheme, gamma)? == ParameterClass::Singular;
    let n = scheme.n;
    let d = scheme.d;
    let ni = scheme.internal_dimension();
    let g = gamma.to_f64();
    let exact = match gamma {
        TorusParameter::Exact(v) => Some(TorusParameter::split_exact(v)),
        TorusParameter::Float(_) => None,
    };
    let floor_g: Vec<i64> = match &exact {
        Some((f, _, _)) => f.clone(),
        None => g.iter().map(|x| x.floor() as i64).collect(),
    };

    let frac_g: Vec<f64> = g.iter().zip(&floor_g).map(|(a, b)| a - *b as f64).collect();
    let offset = scheme.physical_image(&frac_g);

    let active: Vec<&(i64, Window)> = scheme.windows.iter().filter(|(_, w)| !w.is_empty()).collect();
    let mut points = Vec::new();
    if !active.is_empty() {
        let m = scheme.full_matrix();
        let minv = m.clone().try_inverse().ok_or(Error::SingularBasis)?;
        // box in (phys, internal, height) coordinates
        let (rlo, rhi) = region.bounds();
        let mut lo = vec![0.0; n];
        let mut hi = vec![0.0; n];
        for r in 0..d {
            lo[r] = rlo[r];
            hi[r] = rhi[r];
        }
        let mut wlo = [f64::INFINITY; 2];
        let mut whi = [f64::NEG_INFINITY; 2];
        for (_, w) in &active {
            let (a, b) = w.bbox();
            for k in 0..2 {
                wlo[k] = wlo[k].min(a[k]);
                whi[k] = whi[k].max(b[k]);
            }
        }
        for r in 0..ni {
            lo[d + r] = wlo[r];
            hi[d + r] = whi[r];
        }
        let classes: Vec<i64> = active.iter().map(|(c, _)| *c).collect();
        if scheme.has_height {
            lo[n - 1] = *classes.iter().min().unwrap() as f64;
            hi[n - 1] = *classes.iter().max().unwrap() as f64;
        }
        let outer_ranges: Vec<(i64, i64)> = (0..d)
            .map(|j| {
                let (a, b) = interval_row(&minv, j, &lo, &hi);
                ((a - g[j] - 1e-7).ceil() as i64, (b - g[j] + 1e-7).floor() as i64)
            })
            .collect();
        // inner block: rows d.., columns d..
        let inner = m.view((d, d), (n - d, n - d)).clone_owned();
        let inner_inv = inner.try_inverse().ok_or(Error::SingularBasis)?;
        let coupling = m.view((d, 0), (n - d, d)).clone_owned();

        let mut outer = vec![0i64; d];
        for_each_box(&outer_ranges, &mut outer, &mut |xo: &[i64]| {
            // residual box for inner y: inner · y_in ∈ box − coupling · y_out
            let yo: Vec<f64> = xo.iter().zip(&g).map(|(x, gj)| *x as f64 + gj).collect();
            let mut rlo = vec![0.0; n - d];
            let mut rhi = vec![0.0; n - d];
            for r in 0..n - d {
                let shift: f64 = (0..d).map(|c| coupling[(r, c)] * yo[c]).sum();
                rlo[r] = lo[d + r] - shift;
                rhi[r] = hi[d + r] - shift;
            }
            let inner_ranges: Vec<(i64, i64)> = (0..n - d)
                .map(|j| {
                    let (a, b) = interval_row(&inner_inv, j, &rlo, &rhi);
                    ((a - g[d + j] - 1e-7).ceil() as i64, (b - g[d + j] + 1e-7).floor() as i64)
                })
                .collect();
            let mut xi = vec![0i64; n - d];
            for_each_box(&inner_ranges, &mut xi, &mut |xi: &[i64]| {
                let x: Vec<i64> = xo.iter().chain(xi).copied().collect();
                if let Some(p) = accept(scheme, &x, &g, &floor_g, offset, exact.as_ref(), h0, region) {
                    points.push(p);
                }
            });
        });
    }
    let pattern = Pattern::new(scheme.frame, points, region.clone(), scheme.kind.name())?;
    Ok(pattern.with_singular(singular))
}

fn accept(
    scheme: &ProjectionScheme,
    x: &[i64],
    g: &[f64],
    floor_g: &[i64],
    offset: [f64; 2],
    exact: Option<&(Vec<i64>, Vec<i64>, i64)>,
    h0: i64,
    region: &Region,
) -> Option<Point> {
    let window = if scheme.has_height {
        let h = x.iter().sum::<i64>() + h0;
        scheme.window(h)?
    } else {
        &scheme.windows[0].1
    };
    if window.is_empty() {
        return None;
    }
    let mut key = [0i64; 4];
    for j in 0..scheme.n {
        let z = x[j] + floor_g[j];
        for k in 0..4 {
            key[k] += z * scheme.phys_exact[j][k];
        }
    }
    // exact part plus a fixed offset image: identical for equivalent parameters
    let base = scheme.frame.position(&key);
    let pos = [base[0] + offset[0], base[1] + offset[1]];
    if !region.contains(pos) {
        return None;
    }
    let y: Vec<f64> = x.iter().zip(g).map(|(a, b)| *a as f64 + b).collect();
    let u = scheme.internal_image(&y);
    let dist = window.signed_distance(u);
    let inside = if dist > FLOAT_MARGIN {
        true
    } else if dist < -FLOAT_MARGIN {
        false
    } else if let Some((floor, frac, den)) = exact {
        // D · P_int(x + γ) with γ = floor + frac / D
        let mut p = [0i64; 4];
        for j in 0..scheme.n {
            let z = den * (x[j] + floor[j]) + frac[j];
            for k in 0..4 {
                p[k] += z * scheme.internal_exact[j][k];
            }
        }
        window.contains_exact(p, *den)
    } else {
        window.contains_f64(u)
    };
    if !inside {
        return None;
    }
    Some(Point { pos, key, label: 0, preimage: x.to_vec() })
}

/// Bounds of `(M y)_row` for `y` in the box `[lo, hi]`.
fn interval_row(m: &DMatrix<f64>, row: usize, lo: &[f64], hi: &[f64]) -> (f64, f64) {
    let mut a = 0.0;
    let mut b = 0.0;
    for k in 0..lo.len() {
        let c = m[(row, k)];
        if c >= 0.0 {
            a += c * lo[k];
            b += c * hi[k];
        } else {
            a += c * hi[k];
            b += c * lo[k];
        }
    }
    (a, b)
}

/// Odometer over an integer box.
fn for_each_box(ranges: &[(i64, i64)], cur: &mut [i64], f: &mut dyn FnMut(&[i64])) {
    if ranges.iter().any(|(a, b)| a > b) {
        return;
    }
    for (c, r) in cur.iter_mut().zip(ranges) {
        *c = r.0;
    }
    loop {
        f(cur);
        let mut k = 0;
        loop {
            if k == ranges.len() {
                return;
            }
            if cur[k] < ranges[k].1 {
                cur[k] += 1;
                break;
            }
            cur[k] = ranges[k].0;
            k += 1;
        }
    }
}
