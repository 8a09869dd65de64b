//! Spectral data of the Hodge Laplacian on the link N = S^m/G: exact circle
//! quotients, round-sphere coexact spectra, and a plain-text file format.

use std::fmt;
use std::path::Path;

use crate::error::{invalid, Error, Result};

/// Two eigenvalues closer than this are aggregated into one family. Built-in
/// spectra are integer-valued, so aggregation never merges distinct modes.
pub const EIGENVALUE_MERGE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeKind {
    Coexact,
    Exact,
    Harmonic,
}

impl fmt::Display for ModeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeKind::Coexact => write!(f, "coexact"),
            ModeKind::Exact => write!(f, "exact"),
            ModeKind::Harmonic => write!(f, "harmonic"),
        }
    }
}

impl std::str::FromStr for ModeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coexact" => Ok(ModeKind::Coexact),
            "exact" => Ok(ModeKind::Exact),
            "harmonic" => Ok(ModeKind::Harmonic),
            other => Err(invalid(format!("unknown mode kind `{other}`"))),
        }
    }
}

/// One eigenvalue family of the link Laplacian acting on `degree`-forms.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ModeFamily {
    pub degree: usize,
    pub kind: ModeKind,
    pub eigenvalue: f64,
    pub multiplicity: u64,
}

/// The (degree, kind, eigenvalue, multiplicity) table of the link, complete
/// up to the cutoff.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LinkSpectrum {
    /// dimension m of the link
    pub m: usize,
    /// order of the quotient group (1 for the full sphere)
    pub group_order: u64,
    /// every family with eigenvalue <= cutoff is present
    pub cutoff: f64,
    /// sorted by (degree, eigenvalue, kind)
    pub modes: Vec<ModeFamily>,
}

impl LinkSpectrum {
    pub fn new(m: usize, group_order: u64, cutoff: f64, mut modes: Vec<ModeFamily>) -> Self {
        sort_families(&mut modes);
        let modes = aggregate(modes);
        LinkSpectrum {
            m,
            group_order,
            cutoff,
            modes,
        }
    }

    /// Families of one form degree.
    pub fn degree(&self, i: usize) -> impl Iterator<Item = &ModeFamily> {
        self.modes.iter().filter(move |f| f.degree == i)
    }

    /// (eigenvalue, multiplicity) pairs of one degree, harmonic families
    /// included or not.
    pub fn eigenvalues(&self, i: usize, include_harmonic: bool) -> Vec<(f64, u64)> {
        self.degree(i)
            .filter(|f| include_harmonic || f.kind != ModeKind::Harmonic)
            .map(|f| (f.eigenvalue, f.multiplicity))
            .collect()
    }
}

fn sort_families(modes: &mut [ModeFamily]) {
    modes.sort_by(|a, b| {
        (a.degree, a.eigenvalue, kind_rank(a.kind))
            .partial_cmp(&(b.degree, b.eigenvalue, kind_rank(b.kind)))
            .unwrap()
    });
}

fn kind_rank(k: ModeKind) -> u8 {
    match k {
        ModeKind::Harmonic => 0,
        ModeKind::Coexact => 1,
        ModeKind::Exact => 2,
    }
}

fn aggregate(modes: Vec<ModeFamily>) -> Vec<ModeFamily> {
    let mut out: Vec<ModeFamily> = Vec::with_capacity(modes.len());
    for fam in modes {
        match out.last_mut() {
            Some(last)
                if last.degree == fam.degree
                    && last.kind == fam.kind
                    && (last.eigenvalue - fam.eigenvalue).abs() < EIGENVALUE_MERGE_TOL =>
            {
                last.multiplicity += fam.multiplicity;
            }
            _ => out.push(fam),
        }
    }
    out
}

/// Spectrum of S^1/Z_k: the circle of circumference 2 pi / k at unit speed.
/// 0-form eigenvalues (k n)^2 with multiplicity 1 (n = 0) or 2 (n >= 1);
/// 1-forms mirror the 0-forms through the Hodge star.
pub fn circle_quotient_spectrum(k: u64, cutoff: f64) -> Result<LinkSpectrum> {
    if k < 1 {
        return Err(invalid(format!("group order k must be >= 1, got {k}")));
    }
    if cutoff.is_nan() || cutoff <= 0.0 {
        return Err(invalid(format!("cutoff must be positive, got {cutoff}")));
    }
    let mut modes = vec![
        ModeFamily {
            degree: 0,
            kind: ModeKind::Harmonic,
            eigenvalue: 0.0,
            multiplicity: 1,
        },
        ModeFamily {
            degree: 1,
            kind: ModeKind::Harmonic,
            eigenvalue: 0.0,
            multiplicity: 1,
        },
    ];
    let mut n = 1u64;
    loop {
        let mu = (k * n) as f64 * (k * n) as f64;
        if mu > cutoff {
            break;
        }
        modes.push(ModeFamily {
            degree: 0,
            kind: ModeKind::Coexact,
            eigenvalue: mu,
            multiplicity: 2,
        });
        modes.push(ModeFamily {
            degree: 1,
            kind: ModeKind::Exact,
            eigenvalue: mu,
            multiplicity: 2,
        });
        n += 1;
    }
    Ok(LinkSpectrum::new(1, k, cutoff, modes))
}

/// Multiplicity of the j-th coexact i-form eigenvalue on round S^m
/// (eigenvalue (j+i)(j+m-1-i), j >= 1):
///
///   (2j+m-1) (j+m-1)! / [ (j+i)(j+m-1-i) (j-1)! i! (m-1-i)! ]
///
/// evaluated in exact integer arithmetic. Validated against the
/// spherical-harmonic count (m=2) and circle Fourier modes (m=1) in tests
/// before any spectrum construction relies on it.
pub fn sphere_coexact_multiplicity(m: usize, i: usize, j: u64) -> u64 {
    assert!(i < m, "coexact i-forms require i < m");
    assert!(j >= 1);
    let m = m as u128;
    let i = i as u128;
    let j = j as u128;
    // numerator: (2j+m-1) * prod_{t=j}^{j+m-1} t   [= (j+m-1)!/(j-1)!]
    let mut num: u128 = 2 * j + m - 1;
    for t in j..=(j + m - 1) {
        num = num.checked_mul(t).expect("multiplicity overflow");
    }
    let mut den: u128 = (j + i) * (j + m - 1 - i);
    den *= factorial_u128(i) * factorial_u128(m - 1 - i);
    debug_assert!(num.is_multiple_of(den), "dimension count must be integral");
    (num / den) as u64
}

fn factorial_u128(n: u128) -> u128 {
    (1..=n).product::<u128>().max(1)
}

/// Coexact i-form spectrum of the round sphere S^m up to the cutoff.
/// For i = m there are no coexact forms and the mode list is empty.
pub fn sphere_coexact_spectrum(m: usize, i: usize, cutoff: f64) -> Result<LinkSpectrum> {
    if m < 1 {
        return Err(invalid("sphere dimension m must be >= 1"));
    }
    if i > m {
        return Err(invalid(format!("degree {i} out of range 0..={m}")));
    }
    if cutoff.is_nan() || cutoff <= 0.0 {
        return Err(invalid(format!("cutoff must be positive, got {cutoff}")));
    }
    let mut modes = Vec::new();
    if i < m {
        let mut j = 1u64;
        loop {
            let mu = (j as f64 + i as f64) * (j as f64 + (m - 1 - i) as f64);
            if mu > cutoff {
                break;
            }
            modes.push(ModeFamily {
                degree: i,
                kind: ModeKind::Coexact,
                eigenvalue: mu,
                multiplicity: sphere_coexact_multiplicity(m, i, j),
            });
            j += 1;
        }
    }
    Ok(LinkSpectrum::new(m, 1, cutoff, modes))
}

/// Invariant violations found in a spectrum; empty means valid.
pub fn validate_spectrum(s: &LinkSpectrum) -> Vec<String> {
    let mut out = Vec::new();
    for (idx, f) in s.modes.iter().enumerate() {
        if f.degree > s.m {
            out.push(format!("family {idx}: degree {} exceeds link dimension {}", f.degree, s.m));
        }
        if f.eigenvalue < 0.0 {
            out.push(format!("family {idx}: negative eigenvalue {}", f.eigenvalue));
        }
        if f.multiplicity == 0 {
            out.push(format!("family {idx}: zero multiplicity"));
        }
        let is_zero = f.eigenvalue.abs() < EIGENVALUE_MERGE_TOL;
        if (f.kind == ModeKind::Harmonic) != is_zero {
            out.push(format!(
                "family {idx}: kind {} inconsistent with eigenvalue {}",
                f.kind, f.eigenvalue
            ));
        }
        if f.kind == ModeKind::Coexact && f.eigenvalue > 0.0 {
            // lower bound (m-i)(i+1) for coexact i-form eigenvalues
            let bound = ((s.m - f.degree) * (f.degree + 1)) as f64;
            if f.eigenvalue < bound - EIGENVALUE_MERGE_TOL {
                out.push(format!(
                    "family {idx}: coexact eigenvalue {} below lower bound {} at degree {}",
                    f.eigenvalue, bound, f.degree
                ));
            }
        }
    }
    // duplicates (same degree, kind, eigenvalue) must have been aggregated
    for w in s.modes.windows(2) {
        if w[0].degree == w[1].degree
            && w[0].kind == w[1].kind
            && (w[0].eigenvalue - w[1].eigenvalue).abs() < EIGENVALUE_MERGE_TOL
        {
            out.push(format!(
                "unaggregated duplicate family at degree {} eigenvalue {}",
                w[0].degree, w[0].eigenvalue
            ));
        }
    }
    // connectedness: exactly one harmonic 0-form of multiplicity 1 (when present)
    let h0: Vec<_> = s
        .modes
        .iter()
        .filter(|f| f.degree == 0 && f.kind == ModeKind::Harmonic)
        .collect();
    if let Some(f) = h0.first() {
        if f.multiplicity != 1 || h0.len() != 1 {
            out.push("harmonic 0-form family must have multiplicity 1 (connected link)".into());
        }
    }
    out
}

/// Write the plain-text format: header `m=<int> k=<int> cutoff=<real>`, then
/// one `<degree> <kind> <eigenvalue> <multiplicity>` line per family.
pub fn write_spectrum(s: &LinkSpectrum, path: &Path) -> Result<()> {
    let mut text = format!("m={} k={} cutoff={}\n", s.m, s.group_order, s.cutoff);
    for f in &s.modes {
        text.push_str(&format!(
            "{} {} {} {}\n",
            f.degree, f.kind, f.eigenvalue, f.multiplicity
        ));
    }
    std::fs::write(path, text)?;
    Ok(())
}

pub fn spectrum_to_string(s: &LinkSpectrum) -> String {
    let mut text = format!("m={} k={} cutoff={}\n", s.m, s.group_order, s.cutoff);
    for f in &s.modes {
        text.push_str(&format!(
            "{} {} {} {}\n",
            f.degree, f.kind, f.eigenvalue, f.multiplicity
        ));
    }
    text
}

/// Parse the text format; `#` starts a comment, blank lines are skipped.
/// Parsing errors carry the 1-based line number; invariant violations are
/// reported as a validation error.
pub fn parse_spectrum(text: &str) -> Result<LinkSpectrum> {
    let mut header: Option<(usize, u64, f64)> = None;
    let mut modes = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lineno = lineno + 1;
        if header.is_none() {
            let mut m = None;
            let mut k = None;
            let mut cutoff = None;
            for field in line.split_whitespace() {
                let (key, value) = field.split_once('=').ok_or(Error::Parse {
                    line: lineno,
                    message: format!("expected key=value in header, got `{field}`"),
                })?;
                match key {
                    "m" => m = Some(parse_field(value, lineno)?),
                    "k" => k = Some(parse_field(value, lineno)?),
                    "cutoff" => cutoff = Some(parse_field(value, lineno)?),
                    other => {
                        return Err(Error::Parse {
                            line: lineno,
                            message: format!("unknown header key `{other}`"),
                        })
                    }
                }
            }
            let (m, k, cutoff): (f64, f64, f64) = match (m, k, cutoff) {
                (Some(m), Some(k), Some(c)) => (m, k, c),
                _ => {
                    return Err(Error::Parse {
                        line: lineno,
                        message: "header must define m, k and cutoff".into(),
                    })
                }
            };
            header = Some((m as usize, k as u64, cutoff));
            continue;
        }
        let mut parts = line.split_whitespace();
        let degree: usize = next_field(&mut parts, lineno, "degree")?;
        let kind: ModeKind = next_field(&mut parts, lineno, "kind")?;
        let eigenvalue: f64 = next_field(&mut parts, lineno, "eigenvalue")?;
        let multiplicity: u64 = next_field(&mut parts, lineno, "multiplicity")?;
        if parts.next().is_some() {
            return Err(Error::Parse {
                line: lineno,
                message: "trailing fields after multiplicity".into(),
            });
        }
        modes.push(ModeFamily {
            degree,
            kind,
            eigenvalue,
            multiplicity,
        });
    }
    let (m, k, cutoff) = header.ok_or(Error::Parse {
        line: 1,
        message: "missing header line".into(),
    })?;
    let spectrum = LinkSpectrum::new(m, k, cutoff, modes);
    let violations = validate_spectrum(&spectrum);
    if !violations.is_empty() {
        return Err(Error::Validation(violations.join("; ")));
    }
    Ok(spectrum)
}

pub fn load_spectrum(path: &Path) -> Result<LinkSpectrum> {
    let text = std::fs::read_to_string(path)?;
    parse_spectrum(&text)
}

fn parse_field<T: std::str::FromStr>(s: &str, line: usize) -> Result<T> {
    s.parse().map_err(|_| Error::Parse {
        line,
        message: format!("cannot parse `{s}`"),
    })
}

fn next_field<'a, T>(
    parts: &mut impl Iterator<Item = &'a str>,
    line: usize,
    name: &str,
) -> Result<T>
where
    T: std::str::FromStr,
    <T as std::str::FromStr>::Err: std::fmt::Debug,
{
    let raw = parts.next().ok_or(Error::Parse {
        line,
        message: format!("missing field `{name}`"),
    })?;
    raw.parse().map_err(|_| Error::Parse {
        line,
        message: format!("cannot parse {name} from `{raw}`"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_k1_modes() {
        let s = circle_quotient_spectrum(1, 5.0).unwrap();
        let d0: Vec<_> = s.degree(0).collect();
        assert_eq!(d0.len(), 3);
        assert_eq!(
            (d0[0].eigenvalue, d0[0].kind, d0[0].multiplicity),
            (0.0, ModeKind::Harmonic, 1)
        );
        assert_eq!(
            (d0[1].eigenvalue, d0[1].kind, d0[1].multiplicity),
            (1.0, ModeKind::Coexact, 2)
        );
        assert_eq!(
            (d0[2].eigenvalue, d0[2].kind, d0[2].multiplicity),
            (4.0, ModeKind::Coexact, 2)
        );
    }

    #[test]
    fn circle_k2_eigenvalues() {
        let s = circle_quotient_spectrum(2, 100.0).unwrap();
        let d0: Vec<_> = s.degree(0).map(|f| (f.eigenvalue, f.multiplicity)).collect();
        assert_eq!(
            d0,
            vec![(0.0, 1), (4.0, 2), (16.0, 2), (36.0, 2), (64.0, 2), (100.0, 2)]
        );
    }

    #[test]
    fn circle_k3_cutoff_excludes_first_mode() {
        let s = circle_quotient_spectrum(3, 8.0).unwrap();
        let nonzero: Vec<_> = s.degree(0).filter(|f| f.eigenvalue > 0.0).collect();
        assert!(nonzero.is_empty(), "first coexact eigenvalue 9 > 8 must be excluded");
    }

    #[test]
    fn invalid_circle_arguments() {
        assert!(circle_quotient_spectrum(0, 1.0).is_err());
        assert!(circle_quotient_spectrum(1, 0.0).is_err());
        assert!(circle_quotient_spectrum(1, -3.0).is_err());
    }

    #[test]
    fn sphere_multiplicity_oracle() {
        // m=2, i=0: spherical harmonics, multiplicity 2l+1 at l = j
        for j in 1..30u64 {
            assert_eq!(sphere_coexact_multiplicity(2, 0, j), 2 * j + 1);
        }
        // m=1, i=0: circle Fourier modes, multiplicity 2
        for j in 1..30u64 {
            assert_eq!(sphere_coexact_multiplicity(1, 0, j), 2);
        }
        // duality on S^3: coexact 2-forms match functions, coexact 1-forms
        // carry the transverse vector count 2j(j+2)
        for j in 1..20u64 {
            assert_eq!(sphere_coexact_multiplicity(3, 0, j), (j + 1) * (j + 1));
            assert_eq!(sphere_coexact_multiplicity(3, 2, j), (j + 1) * (j + 1));
            assert_eq!(sphere_coexact_multiplicity(3, 1, j), 2 * j * (j + 2));
        }
    }

    #[test]
    fn sphere_s2_functions() {
        let s = sphere_coexact_spectrum(2, 0, 7.0).unwrap();
        let fams: Vec<_> = s.modes.iter().map(|f| (f.eigenvalue, f.multiplicity)).collect();
        assert_eq!(fams, vec![(2.0, 3), (6.0, 5)]);
    }

    #[test]
    fn sphere_m1_matches_circle_nonzero_part() {
        let sphere = sphere_coexact_spectrum(1, 0, 5.0).unwrap();
        let circle = circle_quotient_spectrum(1, 5.0).unwrap();
        let a: Vec<_> = sphere.modes.iter().map(|f| (f.eigenvalue, f.multiplicity)).collect();
        let b: Vec<_> = circle
            .degree(0)
            .filter(|f| f.eigenvalue > 0.0)
            .map(|f| (f.eigenvalue, f.multiplicity))
            .collect();
        assert_eq!(a, b);
    }

    #[test]
    fn sphere_s3_coexact_one_forms_meet_bound_with_equality() {
        let s = sphere_coexact_spectrum(3, 1, 4.0).unwrap();
        assert_eq!(s.modes.len(), 1);
        assert_eq!(s.modes[0].eigenvalue, 4.0); // = (m-i)(i+1) at j = 1
        assert!(validate_spectrum(&s).is_empty());
    }

    #[test]
    fn validation_catches_bound_violation() {
        let s = LinkSpectrum::new(
            1,
            1,
            10.0,
            vec![ModeFamily {
                degree: 0,
                kind: ModeKind::Coexact,
                eigenvalue: 0.5,
                multiplicity: 1,
            }],
        );
        let v = validate_spectrum(&s);
        assert_eq!(v.len(), 1);
        assert!(v[0].contains("below lower bound"));
    }

    #[test]
    fn validation_passes_builtin() {
        assert!(validate_spectrum(&circle_quotient_spectrum(1, 10.0).unwrap()).is_empty());
        assert!(validate_spectrum(&sphere_coexact_spectrum(3, 1, 50.0).unwrap()).is_empty());
    }

    #[test]
    fn parse_rejects_negative_eigenvalue() {
        let text = "m=1 k=1 cutoff=5\n0 coexact -1 2\n";
        match parse_spectrum(text) {
            Err(Error::Validation(msg)) => assert!(msg.contains("negative eigenvalue")),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn parse_reports_line_numbers() {
        let text = "m=1 k=1 cutoff=5\n# comment\n0 coexact one 2\n";
        match parse_spectrum(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn round_trip_identity() {
        let s = circle_quotient_spectrum(2, 100.0).unwrap();
        let text = spectrum_to_string(&s);
        let t = parse_spectrum(&text).unwrap();
        assert_eq!(s, t);
    }

    #[test]
    fn weyl_counting_sanity() {
        // |N(Lambda) - (2/k) sqrt(Lambda)| <= 2 for the 0-form counting function
        for k in [1u64, 2, 3, 5] {
            let cutoff = 400.0;
            let s = circle_quotient_spectrum(k, cutoff).unwrap();
            let mut lam = 1.0;
            while lam <= cutoff {
                let count: u64 = s
                    .degree(0)
                    .filter(|f| f.eigenvalue <= lam && f.eigenvalue > 0.0)
                    .map(|f| f.multiplicity)
                    .sum();
                let weyl = 2.0 / k as f64 * lam.sqrt();
                assert!(
                    (count as f64 - weyl).abs() <= 2.0,
                    "k={k} lambda={lam}: N={count} vs {weyl}"
                );
                lam *= 1.7;
            }
        }
    }

    #[test]
    fn quotient_projection_property() {
        // S^1/Z_k eigenvalues = S^1 eigenvalues with Fourier index divisible by k
        let cutoff = 900.0;
        let full = circle_quotient_spectrum(1, cutoff).unwrap();
        for k in [2u64, 3, 4] {
            let quot = circle_quotient_spectrum(k, cutoff).unwrap();
            let projected: Vec<_> = full
                .degree(0)
                .filter(|f| {
                    let n = f.eigenvalue.sqrt().round() as u64;
                    n.is_multiple_of(k)
                })
                .map(|f| (f.eigenvalue, f.multiplicity))
                .collect();
            let got: Vec<_> = quot
                .degree(0)
                .map(|f| (f.eigenvalue, f.multiplicity))
                .collect();
            assert_eq!(got, projected, "k={k}");
        }
    }

    #[test]
    fn zero_one_duality() {
        let s = circle_quotient_spectrum(3, 500.0).unwrap();
        for f in s.degree(0).filter(|f| f.eigenvalue > 0.0) {
            let partner: u64 = s
                .degree(1)
                .filter(|g| (g.eigenvalue - f.eigenvalue).abs() < EIGENVALUE_MERGE_TOL)
                .map(|g| g.multiplicity)
                .sum();
            assert_eq!(partner, f.multiplicity);
        }
    }
}
