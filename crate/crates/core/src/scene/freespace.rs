//! Traversable free-space extraction: project obstacle footprints onto a
//! floor grid, then keep the 4-connected components of free cells that are
//! large enough.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{FreeSpace, Region, SceneObject};
use crate::geometry::{bounds2, convex_polygons_intersect, OrientedBox, Point2};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FreeSpaceConfig {
    /// Grid cell edge length in meters.
    pub cell_size: f64,
    /// Objects whose bottom is below floor + this height block traversal.
    pub agent_height: f64,
    /// Components smaller than this (m²) are discarded.
    pub min_area: f64,
    /// Classes that never block traversal.
    pub traversable_classes: Vec<String>,
}

impl Default for FreeSpaceConfig {
    fn default() -> Self {
        Self {
            cell_size: 0.1,
            agent_height: 1.5,
            min_area: 0.5,
            traversable_classes: vec!["floor".into(), "ceiling".into(), "floor mat".into()],
        }
    }
}

/// Boolean occupancy over the region's floor rectangle. Cell `(i, j)` covers
/// `origin + [i, i+1) × [j, j+1)` cell widths.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    pub nx: usize,
    pub ny: usize,
    pub origin: Point2,
    pub cell_size: f64,
    occupied: Vec<bool>,
}

impl OccupancyGrid {
    pub fn is_occupied(&self, i: usize, j: usize) -> bool {
        self.occupied[j * self.nx + i]
    }

    pub fn cell_center(&self, i: usize, j: usize) -> Point2 {
        [
            self.origin[0] + (i as f64 + 0.5) * self.cell_size,
            self.origin[1] + (j as f64 + 0.5) * self.cell_size,
        ]
    }

    fn cell_polygon(&self, i: usize, j: usize) -> [Point2; 4] {
        let x0 = self.origin[0] + i as f64 * self.cell_size;
        let y0 = self.origin[1] + j as f64 * self.cell_size;
        let c = self.cell_size;
        [[x0, y0], [x0 + c, y0], [x0 + c, y0 + c], [x0, y0 + c]]
    }
}

fn cells_along(extent: f64, cell: f64) -> usize {
    if extent <= 0.0 {
        0
    } else {
        ((extent / cell) - 1e-9).ceil().max(1.0) as usize
    }
}

pub fn is_obstacle(object: &SceneObject, floor_z: f64, config: &FreeSpaceConfig) -> bool {
    !config.traversable_classes.contains(&object.class_nyu40)
        && object.bbox.z_min() < floor_z + config.agent_height
}

/// Marks every cell whose square overlaps an obstacle footprint (touching
/// edges do not count).
pub fn occupancy_grid(
    region: &Region,
    objects: &[&SceneObject],
    config: &FreeSpaceConfig,
) -> OccupancyGrid {
    let min = region.bounds.min;
    let max = region.bounds.max;
    let nx = cells_along(max[0] - min[0], config.cell_size);
    let ny = cells_along(max[1] - min[1], config.cell_size);
    let mut grid = OccupancyGrid {
        nx,
        ny,
        origin: [min[0], min[1]],
        cell_size: config.cell_size,
        occupied: vec![false; nx * ny],
    };
    if nx == 0 || ny == 0 {
        return grid;
    }
    for object in objects.iter().filter(|o| is_obstacle(o, min[2], config)) {
        let footprint = object.bbox.footprint();
        let (lo, hi) = bounds2(&footprint);
        let lower = |v: f64, o: f64, n: usize| {
            (((v - o) / config.cell_size).floor().max(0.0) as usize).min(n)
        };
        let upper = |v: f64, o: f64, n: usize| {
            (((v - o) / config.cell_size).ceil().max(0.0) as usize).min(n)
        };
        let (i0, i1) = (lower(lo[0], min[0], nx), upper(hi[0], min[0], nx));
        let (j0, j1) = (lower(lo[1], min[1], ny), upper(hi[1], min[1], ny));
        for j in j0..j1 {
            for i in i0..i1 {
                if !grid.occupied[j * nx + i]
                    && convex_polygons_intersect(&grid.cell_polygon(i, j), &footprint, true)
                {
                    grid.occupied[j * nx + i] = true;
                }
            }
        }
    }
    grid
}

/// Connected free regions of at least `min_area`, in discovery order
/// (row-major scan from the grid origin).
pub fn extract_free_space(
    region: &Region,
    objects: &[&SceneObject],
    config: &FreeSpaceConfig,
) -> Vec<FreeSpace> {
    let grid = occupancy_grid(region, objects, config);
    let (nx, ny) = (grid.nx, grid.ny);
    let mut label = vec![false; nx * ny];
    let mut out = Vec::new();
    let cell_area = config.cell_size * config.cell_size;
    for start in 0..nx * ny {
        if grid.occupied[start] || label[start] {
            continue;
        }
        let mut component = Vec::new();
        let mut queue = VecDeque::from([start]);
        label[start] = true;
        while let Some(idx) = queue.pop_front() {
            let (i, j) = (idx % nx, idx / nx);
            component.push([i as i32, j as i32]);
            let mut visit = |ni: usize, nj: usize| {
                let n = nj * nx + ni;
                if !grid.occupied[n] && !label[n] {
                    label[n] = true;
                    queue.push_back(n);
                }
            };
            if i > 0 {
                visit(i - 1, j);
            }
            if i + 1 < nx {
                visit(i + 1, j);
            }
            if j > 0 {
                visit(i, j - 1);
            }
            if j + 1 < ny {
                visit(i, j + 1);
            }
        }
        let area = component.len() as f64 * cell_area;
        if area + 1e-9 < config.min_area {
            continue;
        }
        component.sort_by_key(|c| (c[1], c[0]));
        let id = format!("{}_free{}", region.id, out.len());
        let bbox = fit_box(&component, &grid, region.bounds.min[2], config.agent_height);
        out.push(FreeSpace {
            id,
            region_id: region.id.clone(),
            origin: grid.origin,
            cell_size: config.cell_size,
            cells: component,
            bbox,
            area,
        });
    }
    out
}

/// Axis-aligned box over the component's cells, extruded to agent height.
fn fit_box(cells: &[[i32; 2]], grid: &OccupancyGrid, floor_z: f64, height: f64) -> OrientedBox {
    let (mut lo, mut hi) = ([i32::MAX; 2], [i32::MIN; 2]);
    for c in cells {
        lo = [lo[0].min(c[0]), lo[1].min(c[1])];
        hi = [hi[0].max(c[0]), hi[1].max(c[1])];
    }
    let s = grid.cell_size;
    let min = [
        grid.origin[0] + lo[0] as f64 * s,
        grid.origin[1] + lo[1] as f64 * s,
        floor_z,
    ];
    let max = [
        grid.origin[0] + (hi[0] + 1) as f64 * s,
        grid.origin[1] + (hi[1] + 1) as f64 * s,
        floor_z + height,
    ];
    OrientedBox::from_min_max(min, max).expect("non-empty component has positive extent")
}
