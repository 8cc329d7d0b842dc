use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Exponent coefficient of the Gaussian density, `exp(-25‖q - μ‖² / 9)`.
pub const GAUSSIAN_SHAPE: f64 = 25.0 / 9.0;
/// Headroom left below one when scaling utilities.
pub const DEFAULT_MARGIN: f64 = 0.01;
/// The moving mean stops changing here.
pub const MOVING_SETTLE_TIME: u64 = 700;
/// The moving mean leaves its start point after this step.
pub const MOVING_START_TIME: u64 = 300;
/// Relative slack on "within distance r_m"; centre arithmetic is not exact.
const DISTANCE_SLACK: f64 = 1e-9;

pub type Point = [f64; 2];

/// Rectangular grid of square cells. Cell `(j, l)` has index `l * width + j`
/// and centre `(offset + side * j, offset + side * l)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    width: usize,
    height: usize,
    side: f64,
    offset: f64,
}

impl GridSpec {
    pub fn new(width: usize, height: usize, side: f64, offset: f64) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Domain(
                "grid needs at least one cell in each direction".into(),
            ));
        }
        if !(side.is_finite() && side > 0.0) || !offset.is_finite() {
            return Err(Error::Domain(format!(
                "bad cell geometry: side {side}, offset {offset}"
            )));
        }
        Ok(GridSpec {
            width,
            height,
            side,
            offset,
        })
    }

    /// 9 x 6 cells of side 0.3 with centres at 0.15 + 0.3 j.
    pub fn field_9x6() -> Self {
        GridSpec::new(9, 6, 0.3, 0.15).expect("static grid")
    }

    /// `width x height` cells of side 0.3, same origin as [`Self::field_9x6`].
    pub fn with_size(width: usize, height: usize) -> Result<Self> {
        GridSpec::new(width, height, 0.3, 0.15)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn cell_count(&self) -> usize {
        self.width * self.height
    }

    pub fn cell(&self, j: usize, l: usize) -> usize {
        debug_assert!(j < self.width && l < self.height);
        l * self.width + j
    }

    pub fn coords(&self, cell: usize) -> (usize, usize) {
        (cell % self.width, cell / self.width)
    }

    pub fn center(&self, cell: usize) -> Point {
        let (j, l) = self.coords(cell);
        [
            self.offset + self.side * j as f64,
            self.offset + self.side * l as f64,
        ]
    }

    /// The cell whose centre is `p`, up to rounding.
    pub fn locate(&self, p: Point) -> Option<usize> {
        let index = |x: f64, n: usize| {
            let k = ((x - self.offset) / self.side).round();
            (k >= 0.0 && (k as usize) < n).then_some(k as usize)
        };
        let cell = self.cell(index(p[0], self.width)?, index(p[1], self.height)?);
        let c = self.center(cell);
        let close =
            (c[0] - p[0]).abs() <= 1e-6 * self.side && (c[1] - p[1]).abs() <= 1e-6 * self.side;
        close.then_some(cell)
    }

    /// King-move neighbourhood of `cell`, the cell itself included.
    pub fn king_neighbourhood(&self, cell: usize) -> Vec<usize> {
        let (j, l) = self.coords(cell);
        let mut out = Vec::with_capacity(9);
        for nl in l.saturating_sub(1)..=(l + 1).min(self.height - 1) {
            for nj in j.saturating_sub(1)..=(j + 1).min(self.width - 1) {
                out.push(self.cell(nj, nl));
            }
        }
        out
    }

    /// Cells whose centres lie within `radius` of the centre of `cell`.
    pub fn disk(&self, cell: usize, radius: f64) -> Vec<usize> {
        let (j, l) = self.coords(cell);
        let limit = radius * radius * (1.0 + DISTANCE_SLACK);
        (0..self.cell_count())
            .filter(|&q| {
                let (qj, ql) = self.coords(q);
                let dj = qj as f64 - j as f64;
                let dl = ql as f64 - l as f64;
                (dj * dj + dl * dl) * self.side * self.side <= limit
            })
            .collect()
    }
}

/// Mean of the moving Gaussian at integer step `t`.
pub fn moving_mean(t: u64) -> Point {
    if t <= MOVING_START_TIME {
        [0.45, 0.45]
    } else if t < MOVING_SETTLE_TIME {
        let t = t as f64;
        [0.00375 * t - 0.675, 0.00225 * t - 0.225]
    } else {
        [1.95, 1.35]
    }
}

/// Unscaled density over the grid cells.
#[derive(Clone, Debug, PartialEq)]
pub enum DensityField {
    Uniform(f64),
    Gaussian {
        mean: Point,
        shape: f64,
    },
    MovingGaussian {
        shape: f64,
    },
    /// One nonnegative value per cell, in cell-index order.
    Tabulated(Vec<f64>),
}

impl DensityField {
    /// `exp(-25‖q - μ‖²/9)` around `mean`.
    pub fn gaussian(mean: Point) -> Self {
        DensityField::Gaussian {
            mean,
            shape: GAUSSIAN_SHAPE,
        }
    }

    pub fn moving() -> Self {
        DensityField::MovingGaussian {
            shape: GAUSSIAN_SHAPE,
        }
    }

    /// Parses whitespace- or comma-separated values, one per cell, row-major
    /// (`j` fastest). Blank lines and `#` comments are skipped.
    pub fn parse_tabulated(text: &str, grid: &GridSpec) -> Result<Self> {
        let values = text
            .lines()
            .map(|line| line.split('#').next().unwrap_or(""))
            .flat_map(|line| line.split(|c: char| c == ',' || c.is_whitespace()))
            .filter(|tok| !tok.is_empty())
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|e| Error::Domain(format!("density value {tok:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if values.len() != grid.cell_count() {
            return Err(Error::Domain(format!(
                "tabulated density has {} values, grid has {} cells",
                values.len(),
                grid.cell_count()
            )));
        }
        let field = DensityField::Tabulated(values);
        field.validate(grid)?;
        Ok(field)
    }

    pub fn validate(&self, grid: &GridSpec) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x >= 0.0;
        match self {
            DensityField::Uniform(w) if !ok(*w) => {
                Err(Error::Domain(format!("uniform density {w}")))
            }
            DensityField::Gaussian { mean, shape }
                if !(mean.iter().all(|m| m.is_finite()) && ok(*shape)) =>
            {
                Err(Error::Domain("bad gaussian parameters".into()))
            }
            DensityField::MovingGaussian { shape } if !ok(*shape) => {
                Err(Error::Domain(format!("gaussian shape {shape}")))
            }
            DensityField::Tabulated(v) if v.len() != grid.cell_count() => {
                Err(Error::Domain(format!(
                    "tabulated density has {} values, grid has {} cells",
                    v.len(),
                    grid.cell_count()
                )))
            }
            DensityField::Tabulated(v) => match v.iter().find(|&&x| !ok(x)) {
                Some(x) => Err(Error::Domain(format!("tabulated density value {x}"))),
                None => Ok(()),
            },
            _ => Ok(()),
        }
    }

    pub fn is_time_varying(&self) -> bool {
        matches!(self, DensityField::MovingGaussian { .. })
    }

    pub fn raw_at(&self, grid: &GridSpec, cell: usize, t: u64) -> f64 {
        let gauss = |mean: Point, shape: f64| {
            let q = grid.center(cell);
            let d2 = (q[0] - mean[0]).powi(2) + (q[1] - mean[1]).powi(2);
            (-shape * d2).exp()
        };
        match self {
            DensityField::Uniform(w) => *w,
            DensityField::Gaussian { mean, shape } => gauss(*mean, *shape),
            DensityField::MovingGaussian { shape } => gauss(moving_mean(t), *shape),
            DensityField::Tabulated(v) => v[cell],
        }
    }

    /// Times at which the field can differ; a single `0` for static fields.
    pub fn distinct_times(&self) -> Vec<u64> {
        if self.is_time_varying() {
            (MOVING_START_TIME..=MOVING_SETTLE_TIME).collect()
        } else {
            vec![0]
        }
    }
}

/// Mission space, density, obstacles and sensing radius.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverageWorld {
    grid: GridSpec,
    density: DensityField,
    obstacles: BTreeSet<usize>,
    sensing_radius: f64,
    scale: Option<f64>,
    margin: f64,
}

impl CoverageWorld {
    /// No obstacles, sensing radius equal to one cell side, automatic scaling.
    pub fn new(grid: GridSpec, density: DensityField) -> Result<Self> {
        density.validate(&grid)?;
        let sensing_radius = grid.side();
        Ok(CoverageWorld {
            grid,
            density,
            obstacles: BTreeSet::new(),
            sensing_radius,
            scale: None,
            margin: DEFAULT_MARGIN,
        })
    }

    /// Static Gaussian at (1.95, 1.35) on the 9 x 6 field with a diagonal
    /// line of four obstacles in front of it.
    pub fn obstacle_course() -> Self {
        CoverageWorld::new(GridSpec::field_9x6(), DensityField::gaussian([1.95, 1.35]))
            .and_then(|w| w.with_obstacle_points(&OBSTACLE_COURSE))
            .expect("static world")
    }

    /// Moving Gaussian on the open 9 x 6 field.
    pub fn moving_target() -> Self {
        CoverageWorld::new(GridSpec::field_9x6(), DensityField::moving()).expect("static world")
    }

    pub fn with_obstacle_points(mut self, points: &[Point]) -> Result<Self> {
        for &p in points {
            let cell = self.grid.locate(p).ok_or_else(|| {
                Error::Domain(format!(
                    "obstacle ({}, {}) is not a cell centre",
                    p[0], p[1]
                ))
            })?;
            self.obstacles.insert(cell);
        }
        Ok(self)
    }

    pub fn with_obstacle_cells(mut self, cells: &[usize]) -> Result<Self> {
        for &c in cells {
            if c >= self.grid.cell_count() {
                return Err(Error::Domain(format!("obstacle cell {c} outside the grid")));
            }
            self.obstacles.insert(c);
        }
        Ok(self)
    }

    pub fn with_sensing_radius(mut self, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(Error::Domain(format!("sensing radius {radius}")));
        }
        self.sensing_radius = radius;
        Ok(self)
    }

    /// Fixes the density scale instead of deriving it.
    pub fn with_scale(mut self, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::Domain(format!("density scale {scale}")));
        }
        self.scale = Some(scale);
        Ok(self)
    }

    pub fn with_margin(mut self, margin: f64) -> Result<Self> {
        if !(margin > 0.0 && margin < 1.0) {
            return Err(Error::Domain(format!(
                "scaling margin {margin} outside (0, 1)"
            )));
        }
        self.margin = margin;
        Ok(self)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn density(&self) -> &DensityField {
        &self.density
    }

    pub fn obstacles(&self) -> &BTreeSet<usize> {
        &self.obstacles
    }

    pub fn sensing_radius(&self) -> f64 {
        self.sensing_radius
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn fixed_scale(&self) -> Option<f64> {
        self.scale
    }

    /// The scale in effect: fixed, or derived from [`scale_for_assumption2`].
    pub fn scale(&self) -> f64 {
        self.scale
            .unwrap_or_else(|| scale_for_assumption2(self, self.margin))
    }

    /// `A_i = Q \ O`, in cell-index order.
    pub fn action_cells(&self) -> Vec<usize> {
        (0..self.grid.cell_count())
            .filter(|c| !self.obstacles.contains(c))
            .collect()
    }

    /// `D(c)`; obstacle cells are sensed like any other.
    pub fn sensing_set(&self, cell: usize) -> Vec<usize> {
        self.grid.disk(cell, self.sensing_radius)
    }

    /// Scaled density `s W(q, t)`.
    pub fn density_at(&self, cell: usize, t: u64) -> f64 {
        self.scale() * self.density.raw_at(&self.grid, cell, t)
    }
}

/// Obstacle centres of the obstacle course.
pub const OBSTACLE_COURSE: [Point; 4] = [[0.75, 1.35], [1.05, 1.05], [1.35, 0.75], [1.65, 0.45]];

/// Largest unscaled single-agent utility over action cells and times.
pub fn max_unscaled_utility(world: &CoverageWorld) -> f64 {
    let cells = world.action_cells();
    let sets: Vec<Vec<usize>> = cells.iter().map(|&c| world.sensing_set(c)).collect();
    world
        .density
        .distinct_times()
        .into_iter()
        .flat_map(|t| {
            sets.iter().map(move |d| {
                d.iter()
                    .map(|&q| world.density.raw_at(&world.grid, q, t))
                    .sum::<f64>()
            })
        })
        .fold(0.0, f64::max)
}

/// `s = (1 - margin) / U_max`, or `1` for a zero density.
pub fn scale_for_assumption2(world: &CoverageWorld, margin: f64) -> f64 {
    let u_max = max_unscaled_utility(world);
    if u_max > 0.0 {
        (1.0 - margin) / u_max
    } else {
        1.0
    }
}
