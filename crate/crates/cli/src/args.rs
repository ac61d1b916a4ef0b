//! Flag value parsers.

use collimetric_core::collision::{direction_preset, GripperSpec};
use collimetric_core::Point3;

fn numbers(s: &str, sep: char) -> Result<Vec<f64>, String> {
    s.split(sep)
        .map(|f| {
            let f = f.trim();
            f.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("`{f}` is not a finite number"))
        })
        .collect()
}

/// `LxMxN` in millimeters.
pub fn gripper(s: &str) -> Result<GripperSpec, String> {
    match *numbers(s, 'x')?.as_slice() {
        [length, width, height] if length > 0.0 && width > 0.0 && height > 0.0 => {
            Ok(GripperSpec { length, width, height })
        }
        [_, _, _] => Err("gripper dimensions must be positive".into()),
        _ => Err(format!("expected LxMxN (e.g. 10x10x10), got `{s}`")),
    }
}

/// `WxH` in millimeters.
pub fn extent(s: &str) -> Result<(f64, f64), String> {
    match *numbers(s, 'x')?.as_slice() {
        [w, h] if w > 0.0 && h > 0.0 => Ok((w, h)),
        _ => Err(format!("expected positive WxH (e.g. 400x400), got `{s}`")),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Directions(pub Vec<Point3>);

/// A preset count (`1`, `4`, `7`) or explicit vectors `x,y,z;x,y,z`,
/// normalized here.
pub fn directions(s: &str) -> Result<Directions, String> {
    if let Ok(count) = s.trim().parse::<usize>() {
        return direction_preset(count).map(Directions).map_err(|e| e.to_string());
    }
    s.split(';')
        .filter(|v| !v.trim().is_empty())
        .map(|v| match *numbers(v, ',')?.as_slice() {
            [x, y, z] => {
                let p = Point3::new(x, y, z);
                let n = p.norm();
                if n > 1e-9 {
                    Ok(p * (1.0 / n))
                } else {
                    Err(format!("direction `{v}` has zero length"))
                }
            }
            _ => Err(format!("expected x,y,z, got `{v}`")),
        })
        .collect::<Result<Vec<_>, _>>()
        .and_then(|v| {
            if v.is_empty() {
                Err("no directions given".into())
            } else {
                Ok(Directions(v))
            }
        })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TzList(pub Vec<f64>);

/// Comma-separated, strictly increasing, non-negative.
pub fn tz_list(s: &str) -> Result<TzList, String> {
    let v = numbers(s, ',')?;
    if v.is_empty() {
        return Err("empty tolerance list".into());
    }
    if v.iter().any(|&t| t < 0.0) {
        return Err("tolerances must be >= 0".into());
    }
    if v.windows(2).any(|w| w[0] >= w[1]) {
        return Err(format!("tolerances must be strictly increasing, got `{s}`"));
    }
    Ok(TzList(v))
}

pub fn non_negative(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a finite number >= 0, got `{s}`")),
    }
}

pub fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got `{s}`")),
    }
}

/// Comma-separated list of exactly `N` numbers.
pub fn tuple<const N: usize>(s: &str) -> Result<[f64; N], String> {
    numbers(s, ',')?
        .try_into()
        .map_err(|_| format!("expected {N} comma-separated numbers, got `{s}`"))
}
