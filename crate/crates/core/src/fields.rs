//! Per-face 2-form values and per-vertex functions, and their extensions over caps.
//!
//! A [`FaceForm`] stores the integral of a 2-form over each face, so integration is a
//! plain sum. Two extensions are provided: one that makes the total integral over the
//! capped mesh any prescribed value while leaving every collar face untouched, and one
//! that makes a vertex function satisfy the sign condition for the
//! Euler characteristic of the capped mesh.

use serde::{Deserialize, Serialize};

use crate::capping::CapAtlas;
use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// Integrated 2-form value per face.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceForm {
    face_values: Vec<f64>,
}

/// Function value per vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexField {
    vertex_values: Vec<f64>,
}

macro_rules! value_vec {
    ($ty:ident, $field:ident, $count:ident, $what:literal) => {
        impl $ty {
            pub fn new(values: Vec<f64>) -> Self {
                $ty { $field: values }
            }

            pub fn constant(mesh: &Mesh, value: f64) -> Self {
                $ty::new(vec![value; mesh.$count()])
            }

            pub fn zeros(n: usize) -> Self {
                $ty::new(vec![0.0; n])
            }

            pub fn len(&self) -> usize {
                self.$field.len()
            }

            pub fn is_empty(&self) -> bool {
                self.$field.is_empty()
            }

            pub fn get(&self, i: usize) -> f64 {
                self.$field[i]
            }

            pub fn set(&mut self, i: usize, value: f64) {
                self.$field[i] = value;
            }

            pub fn as_slice(&self) -> &[f64] {
                &self.$field
            }

            pub fn into_vec(self) -> Vec<f64> {
                self.$field
            }

            /// Errors unless there is exactly one value per simplex of `mesh`.
            pub fn check(&self, mesh: &Mesh) -> Result<()> {
                if self.len() != mesh.$count() {
                    return Err(Error::IndexMismatch {
                        what: $what,
                        expected: mesh.$count(),
                        got: self.len(),
                    });
                }
                Ok(())
            }
        }

        impl std::ops::Neg for $ty {
            type Output = $ty;
            fn neg(self) -> $ty {
                $ty::new(self.$field.into_iter().map(|x| -x).collect())
            }
        }
    };
}

value_vec!(FaceForm, face_values, num_faces, "face form");
value_vec!(VertexField, vertex_values, num_vertices, "vertex field");

/// Total integral of a form.
pub fn integrate(form: &FaceForm) -> f64 {
    form.as_slice().iter().sum()
}

/// Bookkeeping of one prescribed-integral extension.
///
/// `collar_sum + scale * interior_sum` is the mass carried by the caps after
/// rescaling, and equals `cap_target` whenever the extension succeeded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionReport {
    pub target_total: f64,
    pub mesh_total: f64,
    pub cap_target: f64,
    pub collar_sum: f64,
    pub interior_sum: f64,
    pub scale: f64,
    pub achieved_total: f64,
}

impl ExtensionReport {
    pub fn achieved_cap_total(&self) -> f64 {
        self.collar_sum + self.scale * self.interior_sum
    }
}

/// Interior rescaling factor `(cap_target − collar_sum) / interior_sum`.
pub fn interior_scale(cap_target: f64, collar_sum: f64, interior_sum: f64) -> Result<f64> {
    if interior_sum == 0.0 {
        return Err(Error::ZeroInteriorMass);
    }
    let scale = (cap_target - collar_sum) / interior_sum;
    if !scale.is_finite() {
        return Err(Error::ZeroInteriorMass);
    }
    Ok(scale)
}

/// Rescales the cap interiors of an arbitrary extension so the whole form integrates
/// to `target_total`. Original and collar faces are left as they are.
pub fn rescale_extension(
    extension: &FaceForm,
    atlas: &CapAtlas,
    target_total: f64,
) -> Result<(FaceForm, ExtensionReport)> {
    if extension.len() != atlas.capped_counts[2] {
        return Err(Error::IndexMismatch {
            what: "face form",
            expected: atlas.capped_counts[2],
            got: extension.len(),
        });
    }
    let sum_over =
        |faces: &mut dyn Iterator<Item = usize>| -> f64 { faces.map(|f| extension.get(f)).sum() };
    let mesh_total = sum_over(&mut atlas.face_map.iter().copied());
    let collar_sum = sum_over(&mut atlas.collar_faces());
    let interior_sum = sum_over(&mut atlas.interior_faces());
    let cap_target = target_total - mesh_total;
    let scale = interior_scale(cap_target, collar_sum, interior_sum)?;

    let mut out = extension.clone();
    for f in atlas.interior_faces() {
        out.set(f, extension.get(f) * scale);
    }
    let report = ExtensionReport {
        target_total,
        mesh_total,
        cap_target,
        collar_sum,
        interior_sum,
        scale,
        achieved_total: integrate(&out),
    };
    Ok((out, report))
}

/// Copies `form` onto the original faces and `seed` onto every cap face.
pub fn seed_extension(form: &FaceForm, atlas: &CapAtlas, seed: f64) -> Result<FaceForm> {
    if form.len() != atlas.original_counts[2] {
        return Err(Error::IndexMismatch {
            what: "face form",
            expected: atlas.original_counts[2],
            got: form.len(),
        });
    }
    let mut values = vec![seed; atlas.capped_counts[2]];
    for (f, &cf) in atlas.face_map.iter().enumerate() {
        values[cf] = form.get(f);
    }
    Ok(FaceForm::new(values))
}

/// Extends `form` over the caps so the capped mesh integrates to `target_total`.
///
/// Collar faces carry `seed` regardless of the target; interior faces carry
/// `seed * scale`.
pub fn extend_form_prescribed_integral(
    form: &FaceForm,
    atlas: &CapAtlas,
    target_total: f64,
    seed: f64,
) -> Result<(FaceForm, ExtensionReport)> {
    rescale_extension(&seed_extension(form, atlas, seed)?, atlas, target_total)
}

/// Extension whose total is `2π χ(capped)`.
pub fn extend_form_gauss_bonnet(
    form: &FaceForm,
    atlas: &CapAtlas,
    seed: f64,
) -> Result<(FaceForm, ExtensionReport)> {
    let target = 2.0 * std::f64::consts::PI * capped_chi(atlas) as f64;
    extend_form_prescribed_integral(form, atlas, target, seed)
}

pub(crate) fn capped_chi(atlas: &CapAtlas) -> i64 {
    let [v, e, f] = atlas.capped_counts;
    v as i64 - e as i64 + f as i64
}

/// Mean value over faces with a boundary edge, or 1 if that mean is zero.
pub fn default_seed(mesh: &Mesh, form: &FaceForm) -> f64 {
    let adjacent: Vec<f64> = (0..mesh.num_faces())
        .filter(|&f| mesh.face_edges(f).iter().any(|&e| mesh.is_boundary_edge(e)))
        .map(|f| form.get(f))
        .collect();
    let mean = adjacent.iter().sum::<f64>() / adjacent.len().max(1) as f64;
    if mean == 0.0 || !mean.is_finite() {
        1.0
    } else {
        mean
    }
}

/// Sign condition for a closed surface of characteristic `chi`:
/// positive somewhere if χ > 0, negative somewhere if χ < 0, and for χ = 0 either
/// identically zero or taking both signs.
pub fn satisfies_sign_condition(values: &[f64], chi: i64) -> bool {
    let positive = values.iter().any(|&x| x > 0.0);
    let negative = values.iter().any(|&x| x < 0.0);
    match chi.signum() {
        1 => positive,
        -1 => negative,
        _ => positive == negative,
    }
}

/// Extends a vertex function over the caps so it meets the sign condition for
/// χ(capped). Values on the original mesh are never changed.
///
/// Inner-ring vertices copy the boundary vertex above them. Apexes take the mean of
/// their inner ring when that already satisfies the condition; otherwise every apex
/// is forced to `±max(1, 2 max|f|)` with the sign the condition asks for.
pub fn extend_field_sign_condition(field: &VertexField, atlas: &CapAtlas) -> Result<VertexField> {
    if field.len() != atlas.original_counts[0] {
        return Err(Error::IndexMismatch {
            what: "vertex field",
            expected: atlas.original_counts[0],
            got: field.len(),
        });
    }
    let mut values = vec![0.0; atlas.capped_counts[0]];
    for (v, &cv) in atlas.vertex_map.iter().enumerate() {
        values[cv] = field.get(v);
    }
    for cap in &atlas.caps {
        for (&b, &r) in cap.boundary.iter().zip(&cap.inner_ring) {
            values[r] = values[b];
        }
        let ring_mean =
            cap.inner_ring.iter().map(|&r| values[r]).sum::<f64>() / cap.inner_ring.len() as f64;
        values[cap.apex] = ring_mean;
    }

    let chi = capped_chi(atlas);
    if !satisfies_sign_condition(&values, chi) {
        let magnitude = field.as_slice().iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let bump = (2.0 * magnitude).max(1.0);
        let apex_value = match chi.signum() {
            1 => bump,
            -1 => -bump,
            // One-signed and not identically zero: push the apexes to the other sign.
            _ => {
                let sign = if field.as_slice().iter().any(|&x| x > 0.0) {
                    1.0
                } else {
                    -1.0
                };
                -sign * bump
            }
        };
        for cap in &atlas.caps {
            values[cap.apex] = apex_value;
        }
    }
    Ok(VertexField::new(values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capping::cap_all;
    use crate::fixtures;
    use std::f64::consts::PI;

    #[test]
    fn integrate_sums_faces() {
        let (m, _) = fixtures::tetrahedron();
        assert_eq!(integrate(&FaceForm::zeros(4)), 0.0);
        assert!((integrate(&FaceForm::constant(&m, PI)) - 4.0 * PI).abs() < 1e-15);
        let form = FaceForm::new(vec![0.3, -1.7, 2.25, 9.5]);
        assert_eq!(integrate(&form) + integrate(&-form), 0.0);
    }

    #[test]
    fn identity_and_worked_scale() {
        assert_eq!(interior_scale(1.0, 0.2, 0.8).unwrap(), 1.0);
        let s = interior_scale(2.0, 0.2, 0.8).unwrap();
        assert!((s - 2.25).abs() < 1e-15);
        assert_eq!(interior_scale(1.0, 0.2, 0.0), Err(Error::ZeroInteriorMass));
    }

    #[test]
    fn worked_example_on_a_real_cap() {
        // Single triangle cap: 6 collar faces, 3 interior faces. Arbitrary extension
        // with collar mass 0.2 and interior mass 0.8; mesh face carries 0.
        let (m, l) = fixtures::single_triangle();
        let (_, _, atlas) = cap_all(&m, &l).unwrap();
        let mut ext = seed_extension(&FaceForm::zeros(1), &atlas, 0.0).unwrap();
        for f in atlas.collar_faces() {
            ext.set(f, 0.2 / 6.0);
        }
        for f in atlas.interior_faces() {
            ext.set(f, 0.8 / 3.0);
        }
        let (same, rep) = rescale_extension(&ext, &atlas, 1.0).unwrap();
        assert!((rep.scale - 1.0).abs() < 1e-15);
        for f in 0..ext.len() {
            assert!((same.get(f) - ext.get(f)).abs() < 1e-15);
        }
        let (out, rep) = rescale_extension(&ext, &atlas, 2.0).unwrap();
        assert!((rep.scale - 2.25).abs() < 1e-14);
        // Independent re-integration.
        assert!((integrate(&out) - 2.0).abs() < 1e-14);
        assert!((rep.achieved_cap_total() - rep.cap_target).abs() < 1e-14);
    }

    #[test]
    fn zero_seed_is_rejected() {
        let (m, l) = fixtures::single_triangle();
        let (_, _, atlas) = cap_all(&m, &l).unwrap();
        let r = extend_form_prescribed_integral(&FaceForm::new(vec![0.5]), &atlas, 3.0, 0.0);
        assert_eq!(r.unwrap_err(), Error::ZeroInteriorMass);
    }

    #[test]
    fn gauss_bonnet_targets() {
        for fx in [fixtures::triangle_data(), fixtures::annulus_data()] {
            let (m, l) = fx.load();
            let (_, _, atlas) = cap_all(&m, &l).unwrap();
            let form = FaceForm::new((0..m.num_faces()).map(|f| 0.1 * f as f64 - 0.2).collect());
            let (out, rep) = extend_form_gauss_bonnet(&form, &atlas, 0.7).unwrap();
            assert!((integrate(&out) - 4.0 * PI).abs() < 1e-10 * 4.0 * PI);
            assert!((rep.achieved_total - 4.0 * PI).abs() < 1e-10 * 4.0 * PI);
        }
    }

    #[test]
    fn collar_seed_rescaled_away_when_mesh_carries_everything() {
        let (m, l) = fixtures::hex_fan();
        let (_, _, atlas) = cap_all(&m, &l).unwrap();
        let form = FaceForm::constant(&m, 4.0 * PI / 6.0);
        let (out, rep) = extend_form_gauss_bonnet(&form, &atlas, 0.5).unwrap();
        // Collar keeps 12 · 0.5 = 6, so the interior must carry −6.
        assert!((rep.cap_target).abs() < 1e-12);
        let interior: f64 = atlas.interior_faces().map(|f| out.get(f)).sum();
        assert!((interior + 6.0).abs() < 1e-12);
        assert!((integrate(&out) - 4.0 * PI).abs() < 1e-10 * 4.0 * PI);
    }

    #[test]
    fn default_seed_falls_back_to_one() {
        let (m, _) = fixtures::hex_fan();
        assert_eq!(default_seed(&m, &FaceForm::zeros(6)), 1.0);
        assert_eq!(default_seed(&m, &FaceForm::constant(&m, 0.25)), 0.25);
    }

    #[test]
    fn sign_condition_predicate() {
        assert!(satisfies_sign_condition(&[-1.0, 0.5], 2));
        assert!(!satisfies_sign_condition(&[-1.0, 0.0], 2));
        assert!(satisfies_sign_condition(&[-1.0, 0.0], -2));
        assert!(satisfies_sign_condition(&[0.0, 0.0], 0));
        assert!(satisfies_sign_condition(&[1.0, -1.0], 0));
        assert!(!satisfies_sign_condition(&[1.0, 2.0], 0));
    }

    #[test]
    fn sign_extension_positive_chi() {
        let (m, l) = fixtures::hex_fan();
        let (_, _, atlas) = cap_all(&m, &l).unwrap();
        let ext = extend_field_sign_condition(&VertexField::constant(&m, -1.0), &atlas).unwrap();
        assert!(ext.as_slice().iter().cloned().fold(f64::MIN, f64::max) > 0.0);
        assert_eq!(ext.get(atlas.caps[0].apex), 2.0);

        // Already positive somewhere: copy-and-mean, nothing forced.
        let mut f = VertexField::constant(&m, -1.0);
        f.set(0, 3.0);
        let ext = extend_field_sign_condition(&f, &atlas).unwrap();
        assert_eq!(ext.get(atlas.caps[0].apex), -1.0);
        assert_eq!(&ext.as_slice()[..7], f.as_slice());
    }

    #[test]
    fn sign_extension_zero_chi() {
        let (m, l) = fixtures::torus_hole();
        let (_, _, atlas) = cap_all(&m, &l).unwrap();
        assert_eq!(capped_chi(&atlas), 0);
        let zero = extend_field_sign_condition(&VertexField::zeros(9), &atlas).unwrap();
        assert!(zero.as_slice().iter().all(|&x| x == 0.0));
        let pos = extend_field_sign_condition(&VertexField::constant(&m, 0.5), &atlas).unwrap();
        assert!(satisfies_sign_condition(pos.as_slice(), 0));
        assert_eq!(pos.get(atlas.caps[0].apex), -1.0);
    }

    #[test]
    fn sign_extension_negative_chi() {
        let (m, l) = fixtures::genus2_hole();
        let (_, _, atlas) = cap_all(&m, &l).unwrap();
        assert_eq!(capped_chi(&atlas), -2);
        let ext = extend_field_sign_condition(&VertexField::constant(&m, 4.0), &atlas).unwrap();
        assert!(satisfies_sign_condition(ext.as_slice(), -2));
        assert_eq!(ext.get(atlas.caps[0].apex), -8.0);
    }

    #[test]
    fn field_json_shape() {
        let json = serde_json::to_string(&VertexField::new(vec![1.0, 2.5])).unwrap();
        assert_eq!(json, r#"{"vertex_values":[1.0,2.5]}"#);
        let form: FaceForm = serde_json::from_str(r#"{"face_values":[0.5]}"#).unwrap();
        assert_eq!(form.as_slice(), &[0.5]);
    }
}
