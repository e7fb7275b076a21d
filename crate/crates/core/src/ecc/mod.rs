//! Euler characteristic curves as exact step functions of the radius.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ComplexKind, FilteredComplex, PointCloud};

/// Right-continuous step function on `[0, ∞)`.
///
/// `values[0]` holds on `[0, b_1)`, `values[i]` on `[b_i, b_{i+1})` and the
/// last value from the last breakpoint on. Breakpoints are strictly
/// increasing and positive; consecutive values differ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepCurve {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    integer_valued: bool,
}

impl StepCurve {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidConfig(format!("step curve: {m}")));
        if values.len() != breakpoints.len() + 1 {
            return bad("need exactly one more value than breakpoints");
        }
        if breakpoints.iter().any(|b| !b.is_finite() || *b <= 0.0) {
            return bad("breakpoints must be finite and positive");
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return bad("breakpoints must be strictly increasing");
        }
        if values.iter().any(|v| !v.is_finite()) {
            return bad("values must be finite");
        }
        let integer_valued = values.iter().all(|v| v.fract() == 0.0);
        Ok(Self::compact(breakpoints, values, integer_valued))
    }

    pub fn constant(value: f64) -> Self {
        StepCurve { breakpoints: vec![], values: vec![value], integer_valued: value.fract() == 0.0 }
    }

    /// Drops breakpoints across which the value does not change.
    fn compact(breakpoints: Vec<f64>, values: Vec<f64>, integer_valued: bool) -> Self {
        let mut b = Vec::with_capacity(breakpoints.len());
        let mut v = Vec::with_capacity(values.len());
        v.push(values[0]);
        for (bp, &val) in breakpoints.into_iter().zip(&values[1..]) {
            if val != *v.last().unwrap() {
                b.push(bp);
                v.push(val);
            }
        }
        StepCurve { breakpoints: b, values: v, integer_valued }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_integer_valued(&self) -> bool {
        self.integer_valued
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.values[self.breakpoints.partition_point(|&b| b <= r)]
    }

    pub fn final_value(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// Multiplies every value by `factor`.
    pub fn scale_values(&self, factor: f64) -> Self {
        let values = self.values.iter().map(|v| v * factor).collect();
        Self::compact(self.breakpoints.clone(), values, self.integer_valued && factor == 1.0)
    }

    /// Rows `(r, value)`: `r = 0` with the initial value, then one row per
    /// breakpoint.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,value\n");
        out.push_str(&format!("0,{:?}\n", self.values[0]));
        for (b, v) in self.breakpoints.iter().zip(&self.values[1..]) {
            out.push_str(&format!("{b:?},{v:?}\n"));
        }
        out
    }

    /// Parses the output of [`StepCurve::to_csv`] (header optional).
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
        let mut rows: Vec<(f64, f64)> = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse { row: i + 1, column: 0, message: e.to_string() })?;
            if i == 0 && rec.get(0).is_some_and(|f| f.parse::<f64>().is_err()) {
                continue;
            }
            if rec.len() != 2 {
                return Err(Error::Parse { row: i + 1, column: 0, message: format!("expected 2 columns, got {}", rec.len()) });
            }
            let mut pair = [0.0; 2];
            for (c, slot) in pair.iter_mut().enumerate() {
                *slot = rec[c].parse().map_err(|_| Error::Parse {
                    row: i + 1,
                    column: c + 1,
                    message: format!("not a number: {:?}", &rec[c]),
                })?;
            }
            rows.push((pair[0], pair[1]));
        }
        match rows.first() {
            Some(&(0.0, _)) => {}
            _ => return Err(Error::Parse { row: 1, column: 1, message: "first row must be at r = 0".into() }),
        }
        let breakpoints = rows[1..].iter().map(|r| r.0).collect();
        let values = rows.iter().map(|r| r.1).collect();
        Self::new(breakpoints, values)
    }
}

/// χ(r): signed count of simplices with radius at most `r`.
pub fn euler_curve(fc: &FilteredComplex) -> StepCurve {
    let mut breakpoints = Vec::new();
    let mut values = vec![0.0];
    let mut chi: i64 = 0;
    let mut current = 0.0;
    for (s, r) in fc.cells() {
        if *r > current {
            if breakpoints.is_empty() {
                values[0] = chi as f64;
            } else {
                values.push(chi as f64);
            }
            breakpoints.push(*r);
            current = *r;
        }
        chi += if s.len() % 2 == 1 { 1 } else { -1 };
    }
    if breakpoints.is_empty() {
        values[0] = chi as f64;
    } else {
        values.push(chi as f64);
    }
    StepCurve::compact(breakpoints, values, true)
}

/// Multiplies coordinates by `n^(1/d)`. Apply once, right before building a
/// complex.
pub fn rescale_cloud(cloud: &PointCloud) -> PointCloud {
    let n = cloud.len() as f64;
    let factor = match cloud.dim() {
        1 => n,
        2 => n.sqrt(),
        3 => n.cbrt(),
        d => n.powf(1.0 / d as f64),
    };
    cloud.scaled(factor)
}

/// ECC of the rescaled cloud under the given filtration.
pub fn sample_curve(cloud: &PointCloud, kind: ComplexKind) -> Result<StepCurve> {
    Ok(euler_curve(&kind.build(&rescale_cloud(cloud))?))
}

/// Pointwise average over the union of all breakpoints.
pub fn mean_curve(curves: &[StepCurve]) -> Result<StepCurve> {
    if curves.is_empty() {
        return Err(Error::InvalidConfig("mean of zero curves".into()));
    }
    if curves.len() == 1 {
        return Ok(curves[0].clone());
    }
    let mut events: Vec<(f64, f64)> = Vec::new();
    let mut start = 0.0;
    for c in curves {
        start += c.values[0];
        for (i, &b) in c.breakpoints.iter().enumerate() {
            events.push((b, c.values[i + 1] - c.values[i]));
        }
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let m = curves.len() as f64;
    let mut breakpoints = Vec::new();
    let mut values = vec![start / m];
    let mut sum = start;
    let mut i = 0;
    while i < events.len() {
        let r = events[i].0;
        while i < events.len() && events[i].0 == r {
            sum += events[i].1;
            i += 1;
        }
        breakpoints.push(r);
        values.push(sum / m);
    }
    Ok(StepCurve::compact(breakpoints, values, false))
}

/// Divides every value by `n`.
pub fn normalize_curve(c: &StepCurve, n: usize) -> Result<StepCurve> {
    if n == 0 {
        return Err(Error::InvalidConfig("normalizer must be positive".into()));
    }
    if n == 1 {
        return Ok(c.clone());
    }
    let nf = n as f64;
    let values = c.values.iter().map(|v| v / nf).collect();
    Ok(StepCurve::compact(c.breakpoints.clone(), values, false))
}

/// `sup_r |a(r) - b(r)|`.
pub fn sup_distance(a: &StepCurve, b: &StepCurve) -> f64 {
    sup_distance_argmax(a, b).0
}

/// The supremum together with the smallest radius where it is attained.
pub fn sup_distance_argmax(a: &StepCurve, b: &StepCurve) -> (f64, f64) {
    let (mut i, mut j) = (0, 0);
    let mut best = ((a.values[0] - b.values[0]).abs(), 0.0);
    loop {
        let ra = a.breakpoints.get(i).copied().unwrap_or(f64::INFINITY);
        let rb = b.breakpoints.get(j).copied().unwrap_or(f64::INFINITY);
        let r = ra.min(rb);
        if r == f64::INFINITY {
            return best;
        }
        if ra == r {
            i += 1;
        }
        if rb == r {
            j += 1;
        }
        let d = (a.values[i] - b.values[j]).abs();
        if d > best.0 {
            best = (d, r);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{alpha_filtration, rips_filtration};
    use proptest::prelude::*;

    fn curve(b: &[f64], v: &[f64]) -> StepCurve {
        StepCurve::new(b.to_vec(), v.to_vec()).unwrap()
    }

    #[test]
    fn euler_curve_basics() {
        let one = PointCloud::new(vec![vec![0.3, 0.1]]).unwrap();
        let fc = rips_filtration(&one, 2).unwrap();
        assert_eq!(euler_curve(&fc), StepCurve::constant(1.0));

        let five = PointCloud::new((0..5).map(|i| vec![i as f64, (i * i) as f64]).collect()).unwrap();
        let c = euler_curve(&rips_filtration(&five, 4).unwrap());
        assert_eq!(c.eval(0.0), 5.0);
        assert_eq!(c.final_value(), 1.0);
        assert!(c.is_integer_valued());
    }

    #[test]
    fn euler_curve_steps_are_right_continuous() {
        // 0, 1, 3 on a line: edges at 0.5 and 1.0
        let c = euler_curve(&alpha_filtration(&PointCloud::from_values(vec![0.0, 1.0, 3.0]).unwrap()).unwrap());
        assert_eq!(c.breakpoints(), &[0.5, 1.0]);
        assert_eq!(c.values(), &[3.0, 2.0, 1.0]);
        assert_eq!(c.eval(0.5), 2.0);
        assert_eq!(c.eval(0.4999), 3.0);
    }

    #[test]
    fn cancelling_events_leave_no_breakpoint() {
        // an edge and a triangle entering together cancel out
        let c = euler_curve(&alpha_filtration(
            &PointCloud::new(vec![vec![0.0, 0.0], vec![4.0, 0.0], vec![2.0, 1.0]]).unwrap(),
        )
        .unwrap());
        assert!(!c.breakpoints().contains(&2.5));
        assert_eq!(c.final_value(), 1.0);
    }

    #[test]
    fn rescaling_factors() {
        let c = PointCloud::new(vec![vec![1.0, -2.0]]).unwrap();
        assert_eq!(rescale_cloud(&c), c);
        let c16 = PointCloud::new(vec![vec![0.25, 1.0]; 16]).unwrap();
        assert_eq!(rescale_cloud(&c16).point(0), &[1.0, 4.0]);
        let c8 = PointCloud::new(vec![vec![0.5, 1.0, -3.0]; 8]).unwrap();
        assert_eq!(rescale_cloud(&c8).point(0), &[1.0, 2.0, -6.0]);
    }

    #[test]
    fn mean_examples() {
        let a = curve(&[1.0], &[1.0, 0.0]);
        assert_eq!(mean_curve(std::slice::from_ref(&a)).unwrap(), a);
        let m = mean_curve(&[StepCurve::constant(2.0), StepCurve::constant(4.0)]).unwrap();
        assert_eq!(m.values(), &[3.0]);
        let m = mean_curve(&[a, curve(&[2.0], &[1.0, 0.0])]).unwrap();
        assert_eq!(m.breakpoints(), &[1.0, 2.0]);
        assert_eq!(m.values(), &[1.0, 0.5, 0.0]);
        assert!(!m.is_integer_valued());
        assert!(mean_curve(&[]).is_err());
    }

    #[test]
    fn distance_examples() {
        let a = curve(&[1.0], &[2.0, 0.0]);
        assert_eq!(sup_distance(&a, &a), 0.0);
        assert_eq!(sup_distance(&StepCurve::constant(3.0), &StepCurve::constant(5.0)), 2.0);
        assert_eq!(sup_distance_argmax(&a, &StepCurve::constant(1.0)), (1.0, 0.0));
        let b = curve(&[0.5, 3.0], &[2.0, 5.0, 0.0]);
        assert_eq!(sup_distance_argmax(&a, &b), (5.0, 1.0));
    }

    #[test]
    fn normalization() {
        let c = curve(&[1.0, 2.0], &[9.0, 8.0, 4.0]);
        let nc = normalize_curve(&c, 9).unwrap();
        assert_eq!(nc.values()[0], 1.0);
        assert_eq!(nc.final_value(), 4.0 / 9.0);
        assert_eq!(normalize_curve(&c, 1).unwrap(), c);
        assert_eq!(normalize_curve(&StepCurve::constant(7.0), 7).unwrap().values(), &[1.0]);
    }

    #[test]
    fn csv_and_json_round_trip() {
        let c = curve(&[0.1, 0.30000000000000004, 2.5], &[9.0, 8.0, 5.0, 4.0]);
        let back = StepCurve::read_csv(c.to_csv().as_bytes()).unwrap();
        assert_eq!(back, c);
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<StepCurve>(&json).unwrap(), c);
        assert!(StepCurve::read_csv("r,value\n0.5,1\n".as_bytes()).is_err());
    }

    fn arb_curve() -> impl Strategy<Value = StepCurve> {
        prop::collection::vec((0.01f64..10.0, -20i32..20), 0..12).prop_map(|mut ev| {
            ev.sort_by(|a, b| a.0.total_cmp(&b.0));
            ev.dedup_by(|a, b| a.0 == b.0);
            let b: Vec<f64> = ev.iter().map(|e| e.0).collect();
            let mut v = vec![3.0];
            v.extend(ev.iter().map(|e| e.1 as f64));
            StepCurve::new(b, v).unwrap()
        })
    }

    proptest! {
        #[test]
        fn sup_distance_is_a_metric(a in arb_curve(), b in arb_curve(), c in arb_curve()) {
            let ab = sup_distance(&a, &b);
            prop_assert!(ab >= 0.0);
            prop_assert_eq!(ab, sup_distance(&b, &a));
            prop_assert_eq!(sup_distance(&a, &a), 0.0);
            prop_assert!(sup_distance(&a, &c) <= ab + sup_distance(&b, &c) + 1e-12);
            if ab == 0.0 {
                prop_assert_eq!(&a, &b);
            }
        }

        #[test]
        fn sup_distance_matches_pointwise_max(a in arb_curve(), b in arb_curve()) {
            let mut grid = vec![0.0];
            grid.extend(a.breakpoints());
            grid.extend(b.breakpoints());
            let m = grid.iter().map(|&r| (a.eval(r) - b.eval(r)).abs()).fold(0.0, f64::max);
            let (d, at) = sup_distance_argmax(&a, &b);
            prop_assert_eq!(d, m);
            prop_assert_eq!((a.eval(at) - b.eval(at)).abs(), d);
        }

        #[test]
        fn mean_commutes_with_evaluation(cs in prop::collection::vec(arb_curve(), 1..8), r in 0.0f64..12.0) {
            let m = mean_curve(&cs).unwrap();
            let direct: f64 = cs.iter().map(|c| c.eval(r)).sum::<f64>() / cs.len() as f64;
            prop_assert!((m.eval(r) - direct).abs() < 1e-12);
        }
    }
}
