//! Incremental 3D DDA over the uniform voxel grid.
//!
//! Voxel `(x, y, z)` spans `[x, x+1) · voxel_size` on each axis and the grid
//! covers `[0, dims · voxel_size]`. Space outside the grid is air.

use glam::DVec3;

use crate::model::{GridDims, VoxelAttributes, VoxelCoord, VoxelGrid};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ray {
    pub origin: DVec3,
    /// Unit direction.
    pub dir: DVec3,
    pub t_min: f64,
    pub t_max: f64,
}

impl Ray {
    pub fn new(origin: DVec3, dir: DVec3) -> Self {
        Self::with_range(origin, dir, 0.0, f64::INFINITY)
    }

    pub fn with_range(origin: DVec3, dir: DVec3, t_min: f64, t_max: f64) -> Self {
        debug_assert!(
            (dir.length() - 1.0).abs() < 1e-9,
            "ray direction must be unit"
        );
        debug_assert!(t_min >= 0.0 && t_min < t_max);
        Self {
            origin,
            dir,
            t_min,
            t_max,
        }
    }

    pub fn at(&self, t: f64) -> DVec3 {
        self.origin + self.dir * t
    }
}

/// One visited cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraversalEvent {
    pub cell: VoxelCoord,
    pub t_enter: f64,
    pub t_exit: f64,
    /// Axis-aligned normal of the face the ray entered through, pointing
    /// against the ray.
    pub entry_face_normal: DVec3,
}

impl TraversalEvent {
    pub fn length(&self) -> f64 {
        self.t_exit - self.t_enter
    }
}

fn axis_normal(axis: usize, sign: f64) -> DVec3 {
    let mut n = DVec3::ZERO;
    n[axis] = sign;
    n
}

fn dominant_axis(v: DVec3) -> usize {
    let a = v.abs();
    if a.x >= a.y && a.x >= a.z {
        0
    } else if a.y >= a.z {
        1
    } else {
        2
    }
}

/// Parametric overlap of a ray with the grid box.
#[derive(Clone, Copy, Debug)]
struct BoxClip {
    t_enter: f64,
    t_exit: f64,
    /// Axis whose slab bounds the entry, when the ray starts outside.
    entry_axis: Option<usize>,
    /// Axis whose slab bounds the exit, when the exit is the grid boundary
    /// rather than `t_max`.
    exit_axis: Option<usize>,
}

fn clip_to_box(ray: &Ray, extent: DVec3) -> Option<BoxClip> {
    let mut t_enter = ray.t_min;
    let mut t_exit = ray.t_max;
    let mut entry_axis = None;
    let mut exit_axis = None;
    for axis in 0..3 {
        let o = ray.origin[axis];
        let d = ray.dir[axis];
        if d == 0.0 {
            if o < 0.0 || o > extent[axis] {
                return None;
            }
            continue;
        }
        let (mut t0, mut t1) = ((0.0 - o) / d, (extent[axis] - o) / d);
        if t0 > t1 {
            std::mem::swap(&mut t0, &mut t1);
        }
        if t0 > t_enter {
            t_enter = t0;
            entry_axis = Some(axis);
        }
        if t1 < t_exit {
            t_exit = t1;
            exit_axis = Some(axis);
        }
    }
    (t_enter < t_exit).then_some(BoxClip {
        t_enter,
        t_exit,
        entry_axis,
        exit_axis,
    })
}

/// Lazy cell-by-cell walk along a ray.
///
/// Ties between axes (edge and corner crossings) advance the axis with the
/// smallest next-crossing `t`, preferring x, then y, then z; the cells
/// stepped over at the same `t` appear as zero-length events so that
/// consecutive cells always share a face.
#[derive(Clone, Debug)]
pub struct GridWalk {
    ray: Ray,
    dims: GridDims,
    voxel_size: f64,
    cell: [i64; 3],
    step: [i64; 3],
    t_next: [f64; 3],
    t_current: f64,
    t_end: f64,
    entry_normal: DVec3,
    exit_axis: Option<usize>,
    done: bool,
}

impl GridWalk {
    /// Walk starting wherever the ray first meets the grid.
    pub fn new(ray: &Ray, dims: GridDims, voxel_size: f64) -> Self {
        let extent = Self::extent(dims, voxel_size);
        let Some(clip) = clip_to_box(ray, extent) else {
            return Self::finished(ray, dims, voxel_size);
        };
        let p = ray.at(clip.t_enter);
        let mut cell = [0i64; 3];
        for (axis, c) in cell.iter_mut().enumerate() {
            let max = dims.axis(axis) as i64 - 1;
            *c = ((p[axis] / voxel_size).floor() as i64).clamp(0, max);
            if Some(axis) == clip.entry_axis {
                *c = if ray.dir[axis] > 0.0 { 0 } else { max };
            }
        }
        let entry_normal = match clip.entry_axis {
            Some(axis) => axis_normal(axis, -ray.dir[axis].signum()),
            None => {
                let axis = dominant_axis(ray.dir);
                axis_normal(axis, -ray.dir[axis].signum())
            }
        };
        Self::start(ray, dims, voxel_size, cell, clip, entry_normal)
    }

    /// Walk starting in a known cell. The ray origin must lie in or on the
    /// boundary of `cell`; this avoids ambiguity for rays spawned on a face.
    pub fn from_cell(ray: &Ray, dims: GridDims, voxel_size: f64, cell: VoxelCoord) -> Self {
        debug_assert!(dims.contains(cell));
        let extent = Self::extent(dims, voxel_size);
        let mut t_exit = ray.t_max;
        let mut exit_axis = None;
        for axis in 0..3 {
            let d = ray.dir[axis];
            if d == 0.0 {
                continue;
            }
            let bound = if d > 0.0 { extent[axis] } else { 0.0 };
            let t1 = (bound - ray.origin[axis]) / d;
            if t1 < t_exit {
                t_exit = t1;
                exit_axis = Some(axis);
            }
        }
        let clip = BoxClip {
            t_enter: ray.t_min,
            t_exit: t_exit.max(ray.t_min),
            entry_axis: None,
            exit_axis,
        };
        let axis = dominant_axis(ray.dir);
        let entry_normal = axis_normal(axis, -ray.dir[axis].signum());
        Self::start(
            ray,
            dims,
            voxel_size,
            [cell.x, cell.y, cell.z],
            clip,
            entry_normal,
        )
    }

    fn extent(dims: GridDims, voxel_size: f64) -> DVec3 {
        DVec3::new(dims.x as f64, dims.y as f64, dims.z as f64) * voxel_size
    }

    fn finished(ray: &Ray, dims: GridDims, voxel_size: f64) -> Self {
        Self {
            ray: *ray,
            dims,
            voxel_size,
            cell: [0; 3],
            step: [0; 3],
            t_next: [f64::INFINITY; 3],
            t_current: ray.t_min,
            t_end: ray.t_min,
            entry_normal: DVec3::ZERO,
            exit_axis: None,
            done: true,
        }
    }

    fn start(
        ray: &Ray,
        dims: GridDims,
        voxel_size: f64,
        cell: [i64; 3],
        clip: BoxClip,
        entry_normal: DVec3,
    ) -> Self {
        let mut walk = Self {
            ray: *ray,
            dims,
            voxel_size,
            cell,
            step: [0; 3],
            t_next: [f64::INFINITY; 3],
            t_current: clip.t_enter,
            t_end: clip.t_exit,
            entry_normal,
            exit_axis: clip.exit_axis,
            done: clip.t_enter >= clip.t_exit,
        };
        for axis in 0..3 {
            let d = ray.dir[axis];
            walk.step[axis] = if d > 0.0 {
                1
            } else if d < 0.0 {
                -1
            } else {
                0
            };
            walk.t_next[axis] = walk.boundary_t(axis);
        }
        walk
    }

    fn boundary_t(&self, axis: usize) -> f64 {
        let step = self.step[axis];
        if step == 0 {
            return f64::INFINITY;
        }
        let face = if step > 0 {
            self.cell[axis] + 1
        } else {
            self.cell[axis]
        };
        (face as f64 * self.voxel_size - self.ray.origin[axis]) / self.ray.dir[axis]
    }

    /// Parametric distance where the walk leaves the grid or reaches `t_max`.
    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    /// Normal (against the ray) of the grid face the walk leaves through, or
    /// `None` when the walk stops at `t_max` inside the grid.
    pub fn exit_face_normal(&self) -> Option<DVec3> {
        self.exit_axis
            .filter(|_| self.t_end < self.ray.t_max)
            .map(|axis| axis_normal(axis, -self.ray.dir[axis].signum()))
    }
}

impl Iterator for GridWalk {
    type Item = TraversalEvent;

    fn next(&mut self) -> Option<TraversalEvent> {
        if self.done {
            return None;
        }
        let mut axis = 0;
        if self.t_next[1] < self.t_next[axis] {
            axis = 1;
        }
        if self.t_next[2] < self.t_next[axis] {
            axis = 2;
        }
        let crossing = self.t_next[axis].max(self.t_current);
        let event = TraversalEvent {
            cell: VoxelCoord::new(self.cell[0], self.cell[1], self.cell[2]),
            t_enter: self.t_current,
            t_exit: crossing.min(self.t_end),
            entry_face_normal: self.entry_normal,
        };
        if crossing >= self.t_end {
            self.done = true;
            return Some(event);
        }
        self.cell[axis] += self.step[axis];
        if !(0..self.dims.axis(axis) as i64).contains(&self.cell[axis]) {
            // rounding put the last crossing just before t_end
            self.done = true;
            self.exit_axis = Some(axis);
            self.t_end = event.t_exit;
            return Some(event);
        }
        self.t_current = crossing;
        self.entry_normal = axis_normal(axis, -(self.step[axis] as f64));
        self.t_next[axis] = self.boundary_t(axis);
        Some(event)
    }
}

/// All cells pierced by the ray, in increasing `t`.
pub fn traverse(ray: &Ray, grid: &VoxelGrid) -> Vec<TraversalEvent> {
    GridWalk::new(ray, grid.dims(), grid.voxel_size()).collect()
}

/// A face where the material changes along a ray.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterfaceEvent {
    pub t: f64,
    pub position: DVec3,
    /// Axis-aligned face normal on the side the ray arrives from.
    pub normal: DVec3,
    pub from_attrs: VoxelAttributes,
    pub to_attrs: VoxelAttributes,
    /// Cell on the arrival side; `None` outside the grid.
    pub from_cell: Option<VoxelCoord>,
    /// Cell on the far side; `None` outside the grid.
    pub to_cell: Option<VoxelCoord>,
}

/// Where a walk begins.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WalkStart {
    /// Locate the first cell from the ray origin (which may be outside).
    Auto,
    /// The origin lies in or on the boundary of this cell.
    Cell(VoxelCoord),
}

/// Result of marching a ray up to its first material change.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct March {
    /// Medium the ray travels through before the interface (or until the end
    /// of the ray when there is none).
    pub medium: VoxelAttributes,
    /// Parametric distance where the ray starts inside `medium`.
    pub t_start: f64,
    pub interface: Option<InterfaceEvent>,
    /// `t` where the homogeneous stretch ends: the interface, the grid exit,
    /// or `t_max`.
    pub t_stop: f64,
}

impl March {
    /// Length of the ray inside `medium`, clipped to the grid.
    pub fn medium_length(&self) -> f64 {
        (self.t_stop - self.t_start).max(0.0)
    }
}

/// Marches from the start of the ray to the first face where the grid
/// attributes change, treating everything outside the grid as air.
pub fn march(ray: &Ray, grid: &VoxelGrid, start: WalkStart) -> March {
    let dims = grid.dims();
    let (mut walk, started_inside) = match start {
        WalkStart::Auto => {
            let inside = dims.contains(cell_of(ray.at(ray.t_min), grid.voxel_size()));
            (GridWalk::new(ray, dims, grid.voxel_size()), inside)
        }
        WalkStart::Cell(c) => (GridWalk::from_cell(ray, dims, grid.voxel_size(), c), true),
    };
    let Some(first) = walk.next() else {
        return March {
            medium: VoxelAttributes::AIR,
            t_start: ray.t_min,
            interface: None,
            t_stop: ray.t_min,
        };
    };
    let first_attrs = grid.attrs_or_air(first.cell);
    let entered_from_outside = !started_inside || first.t_enter > ray.t_min;
    if entered_from_outside && !first_attrs.is_air() {
        return March {
            medium: VoxelAttributes::AIR,
            t_start: first.t_enter,
            interface: Some(InterfaceEvent {
                t: first.t_enter,
                position: ray.at(first.t_enter),
                normal: first.entry_face_normal,
                from_attrs: VoxelAttributes::AIR,
                to_attrs: first_attrs,
                from_cell: None,
                to_cell: Some(first.cell),
            }),
            t_stop: first.t_enter,
        };
    }
    let t_start = first.t_enter;
    let mut prev = first;
    for event in walk.by_ref() {
        let attrs = grid.attrs_or_air(event.cell);
        if attrs != first_attrs {
            return March {
                medium: first_attrs,
                t_start,
                interface: Some(InterfaceEvent {
                    t: event.t_enter,
                    position: ray.at(event.t_enter),
                    normal: event.entry_face_normal,
                    from_attrs: first_attrs,
                    to_attrs: attrs,
                    from_cell: Some(prev.cell),
                    to_cell: Some(event.cell),
                }),
                t_stop: event.t_enter,
            };
        }
        prev = event;
    }
    let interface = match walk.exit_face_normal() {
        Some(normal) if !first_attrs.is_air() => Some(InterfaceEvent {
            t: prev.t_exit,
            position: ray.at(prev.t_exit),
            normal,
            from_attrs: first_attrs,
            to_attrs: VoxelAttributes::AIR,
            from_cell: Some(prev.cell),
            to_cell: None,
        }),
        _ => None,
    };
    March {
        medium: first_attrs,
        t_start,
        interface,
        t_stop: prev.t_exit,
    }
}

/// First face after `from_t` where the attributes change, including the grid
/// boundary when a material voxel touches it. `None` when the ray never meets
/// a change.
pub fn next_interface(ray: &Ray, grid: &VoxelGrid, from_t: f64) -> Option<InterfaceEvent> {
    let sub = Ray {
        t_min: from_t.max(ray.t_min),
        ..*ray
    };
    if sub.t_min >= sub.t_max {
        return None;
    }
    march(&sub, grid, WalkStart::Auto).interface
}

/// Cell containing a world-space point (may be out of bounds).
pub fn cell_of(p: DVec3, voxel_size: f64) -> VoxelCoord {
    let c = (p / voxel_size).floor();
    VoxelCoord::new(c.x as i64, c.y as i64, c.z as i64)
}
