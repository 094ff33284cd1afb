use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which normalization line the point lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionTask {
    #[serde(rename = "223")]
    K3,
    #[serde(rename = "224")]
    K4,
}

impl RegionTask {
    pub fn k(self) -> usize {
        match self {
            RegionTask::K3 => 3,
            RegionTask::K4 => 4,
        }
    }

    pub fn code(self) -> u32 {
        match self {
            RegionTask::K3 => 223,
            RegionTask::K4 => 224,
        }
    }

    pub fn from_code(code: u32) -> Result<Self> {
        match code {
            223 => Ok(RegionTask::K3),
            224 => Ok(RegionTask::K4),
            _ => Err(Error::UnknownTask(code.to_string())),
        }
    }

    /// Off-diagonal value on the normalization line.
    pub fn y_of(self, x: f64) -> f64 {
        let k = self.k() as f64;
        (1.0 / k - x) / (k - 1.0)
    }

    /// Upper ends of the R1 and R2 intervals: 1/k² and 2/k².
    pub fn boundaries(self) -> [f64; 2] {
        let k2 = (self.k() * self.k()) as f64;
        [1.0 / k2, 2.0 / k2]
    }

    pub fn x_max(self) -> f64 {
        1.0 / self.k() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionPoint {
    pub x: f64,
    pub y: f64,
    pub task: RegionTask,
}

impl RegionPoint {
    pub fn on_line(task: RegionTask, x: f64) -> Self {
        Self {
            x,
            y: task.y_of(x),
            task,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    R1,
    R2,
    R3,
    R4,
}

impl std::fmt::Display for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

const LINE_TOL: f64 = 1e-12;
pub const MI_MARGIN: f64 = 1e-12;

fn xlog2x(v: f64) -> f64 {
    if v > 0.0 {
        v * v.log2()
    } else {
        0.0
    }
}

/// 2 log₂k + k·x log₂x + k(k−1)·y log₂y.
pub fn mi_on_line(task: RegionTask, x: f64) -> f64 {
    let k = task.k() as f64;
    2.0 * k.log2() + k * xlog2x(x) + k * (k - 1.0) * xlog2x(task.y_of(x))
}

/// The x > 2/k² point where the mutual information reaches one bit,
/// found by bisection once per task.
pub fn mi_threshold_crossing(task: RegionTask) -> f64 {
    static CROSSINGS: [OnceLock<f64>; 2] = [OnceLock::new(), OnceLock::new()];
    let slot = match task {
        RegionTask::K3 => &CROSSINGS[0],
        RegionTask::K4 => &CROSSINGS[1],
    };
    *slot.get_or_init(|| {
        let f = |x: f64| mi_on_line(task, x) - 1.0;
        let (mut lo, mut hi) = (task.boundaries()[1], task.x_max());
        debug_assert!(f(lo) < 0.0 && f(hi) > 0.0);
        while hi - lo > 1e-15 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    })
}

pub fn region_classify(pt: &RegionPoint) -> Result<Region> {
    let task = pt.task;
    let k = task.k() as f64;
    let off = (pt.x + (k - 1.0) * pt.y - 1.0 / k).abs();
    if off > LINE_TOL || pt.x < -LINE_TOL || pt.y < -LINE_TOL {
        return Err(Error::OffLine {
            x: pt.x,
            y: pt.y,
            task: task.code(),
        });
    }
    let x = pt.x.max(0.0);
    let mi = 2.0 * k.log2() + k * xlog2x(x) + k * (k - 1.0) * xlog2x(pt.y.max(0.0));
    let [b1, b2] = task.boundaries();
    Ok(if mi > 1.0 + MI_MARGIN {
        Region::R4
    } else if x <= b1 {
        Region::R1
    } else if x <= b2 {
        Region::R2
    } else {
        Region::R3
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoint_values() {
        assert!((mi_on_line(RegionTask::K3, 0.0) - 1.5f64.log2()).abs() < 1e-12);
        assert!((mi_on_line(RegionTask::K3, 2.0 / 9.0) - 1.0 / 3.0).abs() < 1e-12);
        assert!(mi_on_line(RegionTask::K3, 1.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn crossing_is_one_bit() {
        for t in [RegionTask::K3, RegionTask::K4] {
            let xs = mi_threshold_crossing(t);
            assert!((mi_on_line(t, xs) - 1.0).abs() < 1e-10);
            assert!(xs > t.boundaries()[1] && xs < t.x_max());
        }
    }

    #[test]
    fn classify_examples() {
        let c = |x| region_classify(&RegionPoint::on_line(RegionTask::K3, x)).unwrap();
        assert_eq!(c(0.0), Region::R1);
        assert_eq!(c(1.0 / 9.0), Region::R1);
        assert_eq!(c(0.15), Region::R2);
        assert_eq!(c(2.0 / 9.0), Region::R2);
        assert_eq!(c(0.25), Region::R3);
        assert_eq!(c(1.0 / 3.0), Region::R4);
        let c4 = |x| region_classify(&RegionPoint::on_line(RegionTask::K4, x)).unwrap();
        assert_eq!(c4(1.0 / 16.0), Region::R1);
        assert_eq!(c4(2.0 / 16.0), Region::R2);
        assert_eq!(c4(0.25), Region::R4);
    }

    #[test]
    fn off_line_is_an_error() {
        let pt = RegionPoint {
            x: 0.1,
            y: 0.2,
            task: RegionTask::K3,
        };
        assert!(matches!(region_classify(&pt), Err(Error::OffLine { .. })));
    }
}
