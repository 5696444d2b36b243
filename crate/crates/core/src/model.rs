//! Per-voxel material attributes, the sparse voxel grid and the named
//! material presets.

use std::fmt;

use rustc_hash::FxHashMap;

use crate::error::ModelError;

/// Names of the seven attribute fields, in storage and file order.
pub const ATTRIBUTE_NAMES: [&str; 7] = ["r_t", "g_t", "b_t", "r_a", "g_a", "b_a", "d"];

/// The seven material parameters carried by a voxel.
///
/// `*_t` is transmissivity per color channel (0 = all light enters the voxel,
/// 1 = all light is reflected), `*_a` is attenuation per channel (0 = no
/// absorption, 1 = everything absorbed) and `d` is diffuseness (0 = perfectly
/// specular, 1 = Lambertian). Every field lies in `[0, 1]`; the all-zero value
/// is air.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct VoxelAttributes {
    pub r_t: f32,
    pub g_t: f32,
    pub b_t: f32,
    pub r_a: f32,
    pub g_a: f32,
    pub b_a: f32,
    pub d: f32,
}

impl VoxelAttributes {
    pub const AIR: VoxelAttributes = VoxelAttributes {
        r_t: 0.0,
        g_t: 0.0,
        b_t: 0.0,
        r_a: 0.0,
        g_a: 0.0,
        b_a: 0.0,
        d: 0.0,
    };

    /// Builds an attribute set, rejecting (never clamping) values outside `[0, 1]`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        r_t: f32,
        g_t: f32,
        b_t: f32,
        r_a: f32,
        g_a: f32,
        b_a: f32,
        d: f32,
    ) -> Result<Self, ModelError> {
        Self::from_array([r_t, g_t, b_t, r_a, g_a, b_a, d])
    }

    pub fn from_array(values: [f32; 7]) -> Result<Self, ModelError> {
        for (name, &value) in ATTRIBUTE_NAMES.iter().zip(values.iter()) {
            if !(0.0..=1.0).contains(&value) {
                return Err(ModelError::OutOfRange {
                    field: name,
                    value: value as f64,
                });
            }
        }
        let [r_t, g_t, b_t, r_a, g_a, b_a, d] = values;
        Ok(Self {
            r_t,
            g_t,
            b_t,
            r_a,
            g_a,
            b_a,
            d,
        })
    }

    pub fn to_array(&self) -> [f32; 7] {
        [
            self.r_t, self.g_t, self.b_t, self.r_a, self.g_a, self.b_a, self.d,
        ]
    }

    /// Transmissivity per channel as `[r, g, b]`.
    pub fn transmissivity(&self) -> [f32; 3] {
        [self.r_t, self.g_t, self.b_t]
    }

    /// Attenuation per channel as `[r, g, b]`.
    pub fn attenuation(&self) -> [f32; 3] {
        [self.r_a, self.g_a, self.b_a]
    }

    pub fn is_air(&self) -> bool {
        *self == Self::AIR
    }

    /// Opaque Lambertian material: everything entering is absorbed and the
    /// surface scatters diffusely (the shirt rows of the preset table).
    pub fn is_opaque_diffuse(&self) -> bool {
        self.r_a == 1.0 && self.g_a == 1.0 && self.b_a == 1.0 && self.d == 1.0
    }
}

impl fmt::Display for VoxelAttributes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {}, {}, {}, {}, {})",
            self.r_t, self.g_t, self.b_t, self.r_a, self.g_a, self.b_a, self.d
        )
    }
}

/// Integer voxel index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VoxelCoord {
    pub x: i64,
    pub y: i64,
    pub z: i64,
}

impl VoxelCoord {
    pub const fn new(x: i64, y: i64, z: i64) -> Self {
        Self { x, y, z }
    }

    pub fn axis(&self, axis: usize) -> i64 {
        match axis {
            0 => self.x,
            1 => self.y,
            _ => self.z,
        }
    }

    pub fn with_axis(mut self, axis: usize, value: i64) -> Self {
        match axis {
            0 => self.x = value,
            1 => self.y = value,
            _ => self.z = value,
        }
        self
    }
}

impl fmt::Display for VoxelCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// Grid extent in voxels along x, y and z.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GridDims {
    pub x: u32,
    pub y: u32,
    pub z: u32,
}

impl GridDims {
    pub const fn new(x: u32, y: u32, z: u32) -> Self {
        Self { x, y, z }
    }

    pub const fn cube(n: u32) -> Self {
        Self { x: n, y: n, z: n }
    }

    pub fn axis(&self, axis: usize) -> u32 {
        match axis {
            0 => self.x,
            1 => self.y,
            _ => self.z,
        }
    }

    pub fn contains(&self, c: VoxelCoord) -> bool {
        (0..self.x as i64).contains(&c.x)
            && (0..self.y as i64).contains(&c.y)
            && (0..self.z as i64).contains(&c.z)
    }

    pub fn volume(&self) -> u64 {
        self.x as u64 * self.y as u64 * self.z as u64
    }
}

/// Bounded sparse voxel grid. Only non-air voxels are stored; every in-bounds
/// coordinate without an entry reads back as air.
///
/// Voxel `(x, y, z)` occupies the world-space box
/// `[x, x+1] × [y, y+1] × [z, z+1]` scaled by `voxel_size`, so the grid covers
/// `[0, dims · voxel_size]` on each axis.
#[derive(Clone, Debug, PartialEq)]
pub struct VoxelGrid {
    dims: GridDims,
    voxel_size: f64,
    cells: FxHashMap<VoxelCoord, VoxelAttributes>,
}

impl VoxelGrid {
    pub fn new(dims: GridDims, voxel_size: f64) -> Result<Self, ModelError> {
        if dims.x == 0 || dims.y == 0 || dims.z == 0 {
            return Err(ModelError::InvalidDims(dims));
        }
        if !(voxel_size.is_finite() && voxel_size > 0.0) {
            return Err(ModelError::InvalidVoxelSize(voxel_size));
        }
        Ok(Self {
            dims,
            voxel_size,
            cells: FxHashMap::default(),
        })
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    pub fn voxel_size(&self) -> f64 {
        self.voxel_size
    }

    pub fn in_bounds(&self, c: VoxelCoord) -> bool {
        self.dims.contains(c)
    }

    pub fn get(&self, c: VoxelCoord) -> Result<VoxelAttributes, ModelError> {
        if !self.in_bounds(c) {
            return Err(ModelError::OutOfBounds(c));
        }
        Ok(self.cells.get(&c).copied().unwrap_or(VoxelAttributes::AIR))
    }

    /// Lookup for hot loops; out-of-bounds reads as air.
    #[inline]
    pub fn attrs_or_air(&self, c: VoxelCoord) -> VoxelAttributes {
        self.cells.get(&c).copied().unwrap_or(VoxelAttributes::AIR)
    }

    /// Stores `attrs` at `c`. Writing air removes the cell.
    pub fn set(&mut self, c: VoxelCoord, attrs: VoxelAttributes) -> Result<(), ModelError> {
        if !self.in_bounds(c) {
            return Err(ModelError::OutOfBounds(c));
        }
        if attrs.is_air() {
            self.cells.remove(&c);
        } else {
            self.cells.insert(c, attrs);
        }
        Ok(())
    }

    pub fn occupied_count(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Stored cells in arbitrary order.
    pub fn iter(&self) -> impl Iterator<Item = (VoxelCoord, VoxelAttributes)> + '_ {
        self.cells.iter().map(|(c, a)| (*c, *a))
    }

    /// Stored cells ordered by `(z, y, x)`.
    pub fn sorted_cells(&self) -> Vec<(VoxelCoord, VoxelAttributes)> {
        let mut cells: Vec<_> = self.iter().collect();
        cells.sort_unstable_by_key(|(c, _)| (c.z, c.y, c.x));
        cells
    }
}

/// A named row of the example-material table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaterialPreset {
    pub name: &'static str,
    pub attrs: VoxelAttributes,
}

const fn preset(name: &'static str, v: [f32; 7]) -> MaterialPreset {
    MaterialPreset {
        name,
        attrs: VoxelAttributes {
            r_t: v[0],
            g_t: v[1],
            b_t: v[2],
            r_a: v[3],
            g_a: v[4],
            b_a: v[5],
            d: v[6],
        },
    }
}

/// The fourteen example materials.
pub const MATERIAL_PRESETS: [MaterialPreset; 14] = [
    preset("white_shirt", [0.8, 0.8, 0.8, 1.0, 1.0, 1.0, 1.0]),
    preset("dark_shirt", [0.2, 0.2, 0.2, 1.0, 1.0, 1.0, 1.0]),
    preset("red_shirt", [0.8, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0]),
    preset("green_shirt", [0.0, 0.8, 0.0, 1.0, 1.0, 1.0, 1.0]),
    preset("blue_shirt", [0.0, 0.0, 0.8, 1.0, 1.0, 1.0, 1.0]),
    preset("color_shirt", [0.8, 0.5, 0.2, 1.0, 1.0, 1.0, 1.0]),
    preset("skin", [0.5, 0.5, 0.2, 0.8, 1.0, 1.0, 0.8]),
    preset("brass", [0.8, 0.8, 0.2, 1.0, 1.0, 1.0, 0.2]),
    preset("glass", [0.2, 0.2, 0.2, 0.2, 0.2, 0.2, 0.0]),
    preset("frosted_glass", [0.2, 0.2, 0.2, 0.2, 0.2, 0.2, 0.8]),
    preset("water", [0.2, 0.2, 0.5, 0.2, 0.2, 0.2, 0.0]),
    preset("mirror", [1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0]),
    preset("air", [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
    preset("smoke_mist", [0.5, 0.5, 0.5, 0.2, 0.2, 0.2, 0.5]),
];

/// Canonical preset key: lower case, runs of spaces, `-` and `/` become `_`.
pub fn normalize_material_name(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    let mut pending_sep = false;
    for ch in name.trim().chars() {
        if ch == ' ' || ch == '_' || ch == '-' || ch == '/' {
            pending_sep = true;
            continue;
        }
        if pending_sep && !out.is_empty() {
            out.push('_');
        }
        pending_sep = false;
        out.extend(ch.to_lowercase());
    }
    out
}

/// Looks up a preset by name, case-insensitively, with spaces treated as `_`.
pub fn material_preset(name: &str) -> Result<VoxelAttributes, ModelError> {
    let key = normalize_material_name(name);
    MATERIAL_PRESETS
        .iter()
        .find(|p| p.name == key)
        .map(|p| p.attrs)
        .ok_or_else(|| ModelError::UnknownMaterial(name.to_string()))
}

/// Name of the first preset whose attributes equal `attrs` exactly.
pub fn match_preset(attrs: &VoxelAttributes) -> Option<&'static str> {
    MATERIAL_PRESETS
        .iter()
        .find(|p| p.attrs == *attrs)
        .map(|p| p.name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn glass() -> VoxelAttributes {
        material_preset("glass").unwrap()
    }

    #[test]
    fn constructor_examples() {
        assert_eq!(
            VoxelAttributes::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0).unwrap(),
            VoxelAttributes::AIR
        );
        assert_eq!(
            VoxelAttributes::new(1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0).unwrap(),
            material_preset("mirror").unwrap()
        );
        match VoxelAttributes::new(0.2, 0.2, 0.2, 0.2, 0.2, 0.2, -0.1) {
            Err(ModelError::OutOfRange { field, value }) => {
                assert_eq!(field, "d");
                assert!((value + 0.1).abs() < 1e-6);
            }
            other => panic!("expected OutOfRange, got {other:?}"),
        }
        assert!(VoxelAttributes::new(f32::NAN, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn grid_get_set() {
        let mut grid = VoxelGrid::new(GridDims::new(4, 3, 2), 1.0).unwrap();
        let c = VoxelCoord::new(1, 2, 1);
        assert_eq!(grid.get(c).unwrap(), VoxelAttributes::AIR);
        grid.set(c, glass()).unwrap();
        assert_eq!(
            grid.get(c).unwrap().to_array(),
            [0.2, 0.2, 0.2, 0.2, 0.2, 0.2, 0.0]
        );
        assert!(matches!(
            grid.get(VoxelCoord::new(4, 0, 0)),
            Err(ModelError::OutOfBounds(_))
        ));
        assert!(grid.set(VoxelCoord::new(0, -1, 0), glass()).is_err());

        let mirror = material_preset("mirror").unwrap();
        grid.set(c, mirror).unwrap();
        assert_eq!(grid.get(c).unwrap(), mirror);
        assert_eq!(grid.occupied_count(), 1);
        grid.set(c, VoxelAttributes::AIR).unwrap();
        assert_eq!(grid.occupied_count(), 0);
    }

    #[test]
    fn invalid_grid_metadata() {
        assert!(VoxelGrid::new(GridDims::new(0, 1, 1), 1.0).is_err());
        assert!(VoxelGrid::new(GridDims::cube(1), 0.0).is_err());
        assert!(VoxelGrid::new(GridDims::cube(1), f64::NAN).is_err());
    }

    #[test]
    fn preset_lookup() {
        assert_eq!(
            material_preset("red_shirt").unwrap().to_array(),
            [0.8, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0]
        );
        assert_eq!(
            material_preset("Frosted Glass").unwrap().to_array(),
            [0.2, 0.2, 0.2, 0.2, 0.2, 0.2, 0.8]
        );
        assert_eq!(
            material_preset("Smoke/mist").unwrap(),
            material_preset("smoke_mist").unwrap()
        );
        assert!(matches!(
            material_preset("adamantium"),
            Err(ModelError::UnknownMaterial(_))
        ));
    }

    #[test]
    fn preset_table_matches_decimal_rows() {
        let rows: [(&str, &str); 14] = [
            ("White shirt", "0.8 0.8 0.8 1 1 1 1"),
            ("Dark shirt", "0.2 0.2 0.2 1 1 1 1"),
            ("Red shirt", "0.8 0 0 1 1 1 1"),
            ("Green shirt", "0 0.8 0 1 1 1 1"),
            ("Blue shirt", "0 0 0.8 1 1 1 1"),
            ("Color shirt", "0.8 0.5 0.2 1 1 1 1"),
            ("Skin", "0.5 0.5 0.2 0.8 1 1 0.8"),
            ("Brass", "0.8 0.8 0.2 1 1 1 0.2"),
            ("Glass", "0.2 0.2 0.2 0.2 0.2 0.2 0"),
            ("Frosted Glass", "0.2 0.2 0.2 0.2 0.2 0.2 0.8"),
            ("Water", "0.2 0.2 0.5 0.2 0.2 0.2 0"),
            ("Mirror", "1 1 1 1 1 1 0"),
            ("Air", "0 0 0 0 0 0 0"),
            ("Smoke/mist", "0.5 0.5 0.5 0.2 0.2 0.2 0.5"),
        ];
        for (name, values) in rows {
            let parsed: Vec<f32> = values.split(' ').map(|v| v.parse().unwrap()).collect();
            let got = material_preset(name).unwrap().to_array();
            for (g, p) in got.iter().zip(parsed.iter()) {
                assert_eq!(g.to_bits(), p.to_bits(), "{name}");
            }
        }
    }

    #[test]
    fn material_names_normalize() {
        assert_eq!(
            normalize_material_name("  Frosted   Glass "),
            "frosted_glass"
        );
        assert_eq!(normalize_material_name("RED_SHIRT"), "red_shirt");
    }

    fn arb_attrs() -> impl Strategy<Value = VoxelAttributes> {
        prop::array::uniform7(prop_oneof![Just(0.0f32), Just(1.0f32), 0.0f32..=1.0])
            .prop_map(|v| VoxelAttributes::from_array(v).unwrap())
    }

    proptest! {
        #[test]
        fn constructor_enforces_range(values in prop::array::uniform7(-2.0f32..3.0)) {
            match VoxelAttributes::from_array(values) {
                Ok(a) => prop_assert!(a.to_array().iter().all(|v| (0.0..=1.0).contains(v))),
                Err(_) => prop_assert!(values.iter().any(|v| !(0.0..=1.0).contains(v))),
            }
        }

        #[test]
        fn air_never_stored(
            ops in prop::collection::vec((0i64..5, 0i64..5, 0i64..5, arb_attrs(), any::<bool>()), 1..60)
        ) {
            let mut grid = VoxelGrid::new(GridDims::cube(5), 0.5).unwrap();
            for (x, y, z, attrs, clear) in ops {
                let c = VoxelCoord::new(x, y, z);
                let value = if clear { VoxelAttributes::AIR } else { attrs };
                grid.set(c, value).unwrap();
                prop_assert_eq!(grid.get(c).unwrap(), value);
                if clear {
                    prop_assert!(grid.iter().all(|(stored, _)| stored != c));
                }
            }
            prop_assert!(grid.iter().all(|(c, a)| !a.is_air() && grid.in_bounds(c)));
        }
    }
}
