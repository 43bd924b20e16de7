use super::spike::{spike_map, spike_map_scaled, ComplexSample};
use crate::levy::DriverPath;
use crate::{Error, Result, Version};
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpikeEvent {
    pub angle: f64,
    pub duration: f64,
}

/// Ordered slit events `(φ_k, δt_k)`; the composition
/// `F_n = f_1 ∘ f_2 ∘ … ∘ f_n` solves the Loewner equation with the
/// piecewise-constant driver `L = φ_k` on the k-th interval.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MapChain {
    events: Vec<SpikeEvent>,
    // Cached (e^{δt}, e^{-δt}) per event.
    scales: Vec<(f64, f64)>,
    total_time: f64,
}

impl MapChain {
    pub fn new(events: Vec<SpikeEvent>) -> Result<Self> {
        if let Some(k) = events
            .iter()
            .position(|e| !(e.duration > 0.0) || !e.duration.is_finite() || !e.angle.is_finite())
        {
            return Err(Error::invalid(
                "events",
                format!("event {k} needs a finite angle and duration > 0"),
            ));
        }
        let scales = events
            .iter()
            .map(|e| (e.duration.exp(), (-e.duration).exp()))
            .collect();
        let total_time = events.iter().map(|e| e.duration).sum();
        Ok(MapChain {
            events,
            scales,
            total_time,
        })
    }

    pub fn from_path(path: &DriverPath) -> Result<Self> {
        MapChain::new(
            path.segments
                .iter()
                .map(|s| SpikeEvent {
                    angle: s.level,
                    duration: s.duration,
                })
                .collect(),
        )
    }

    pub fn events(&self) -> &[SpikeEvent] {
        &self.events
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    fn spike(&self, k: usize, z: Complex64) -> Result<ComplexSample> {
        let (et, ent) = self.scales[k];
        spike_map_scaled(z, et, ent).map_err(|e| Error::AtEvent {
            index: k,
            source: Box::new(e),
        })
    }

    /// Applies `f_{upto} ∘ … ∘ f_1`-style composition to `z` for the first
    /// `upto` events (innermost = event `upto − 1`).
    fn compose_prefix(&self, upto: usize, mut z: Complex64) -> Result<ComplexSample> {
        let mut d = Complex64::new(1.0, 0.0);
        for k in (0..upto).rev() {
            let rot = Complex64::cis(self.events[k].angle);
            let s = self.spike(k, z * rot.conj())?;
            z = rot * s.value;
            d *= s.derivative;
        }
        Ok(ComplexSample {
            value: z,
            derivative: d,
        })
    }
}

/// `F_n(w)`, or the tip-centered `F̃_n(w) = F_n(e^{iφ_n}w)` computed by the
/// recursion `F̃_k(w) = F̃_{k−1}(e^{i(φ_k−φ_{k−1})} h(w, δt_k))` with
/// `φ_0 = 0`.
pub fn chain_eval(chain: &MapChain, w: Complex64, tip_centered: bool) -> Result<ComplexSample> {
    if !tip_centered {
        return chain.compose_prefix(chain.len(), w);
    }
    let mut z = w;
    let mut d = Complex64::new(1.0, 0.0);
    for k in (0..chain.len()).rev() {
        let previous = if k == 0 { 0.0 } else { chain.events[k - 1].angle };
        let rot = Complex64::cis(chain.events[k].angle - previous);
        let s = chain.spike(k, z)?;
        z = rot * s.value;
        d *= rot * s.derivative;
    }
    Ok(ComplexSample {
        value: z,
        derivative: d,
    })
}

/// Whole-plane approximation from a chain run over `[0, T]`:
/// exterior `e^{-T} F(w, T)` for `|w| > 1`, interior `1/𝓕(1/w)` for
/// `0 < |w| < 1`.
pub fn whole_plane_map(
    chain: &MapChain,
    w: Complex64,
    version: Version,
    tip_centered: bool,
) -> Result<ComplexSample> {
    let r = w.norm();
    match version {
        Version::Exterior => {
            if !(r > 1.0) {
                return Err(Error::invalid("w", "exterior map needs |w| > 1"));
            }
            exterior(chain, w, tip_centered)
        }
        Version::Interior => {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::invalid("w", "interior map needs 0 < |w| < 1"));
            }
            let e = exterior(chain, w.inv(), tip_centered)?;
            if e.value.norm() == 0.0 || !e.value.is_finite() {
                return Err(Error::InversionPole);
            }
            Ok(ComplexSample {
                value: e.value.inv(),
                derivative: e.derivative / (w * w * e.value * e.value),
            })
        }
    }
}

fn exterior(chain: &MapChain, w: Complex64, tip_centered: bool) -> Result<ComplexSample> {
    let s = chain_eval(chain, w, tip_centered)?;
    let scale = (-chain.total_time()).exp();
    Ok(ComplexSample {
        value: s.value * scale,
        derivative: s.derivative * scale,
    })
}

/// Successive slit-tip positions: for every event and every
/// `j = 1..=samples_per_event`, the image of the tip pre-image after the
/// event has run for the fraction `j/samples_per_event` of its duration.
pub fn trace_hull(chain: &MapChain, samples_per_event: usize) -> Result<Vec<Complex64>> {
    if samples_per_event == 0 {
        return Err(Error::invalid("samples_per_event", "must be ≥ 1"));
    }
    let mut points = Vec::with_capacity(chain.len() * samples_per_event);
    for (k, ev) in chain.events.iter().enumerate() {
        let rot = Complex64::cis(ev.angle);
        for j in 1..=samples_per_event {
            let tau = ev.duration * j as f64 / samples_per_event as f64;
            let tip = rot * spike_map(Complex64::new(1.0, 0.0), tau)?.value;
            points.push(chain.compose_prefix(k, tip)?.value);
        }
    }
    Ok(points)
}

pub fn write_hull_csv<W: std::io::Write>(points: &[Complex64], mut out: W) -> std::io::Result<()> {
    writeln!(out, "re,im")?;
    for p in points {
        writeln!(out, "{},{}", p.re, p.im)?;
    }
    Ok(())
}
