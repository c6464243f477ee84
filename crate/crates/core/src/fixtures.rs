//! The two reference eigenvector matrices, as closed-form radicals and as
//! text fixtures.
//!
//! File format: `#` comment lines, then `params <gamma> <lambda>`, then four
//! lines of four whitespace-separated numbers (row-major, 17 significant
//! digits). Rows are the eigenvectors, ordered like the descending eigenvalues.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::Matrix4;

use crate::error::{Error, Result};
use crate::model::ModelParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixtureCase {
    /// `(γ, λ) = (−1, 1/3)`.
    Case1,
    /// `(γ, λ) = (1, 1)`.
    Case2,
}

impl FixtureCase {
    pub const ALL: [FixtureCase; 2] = [FixtureCase::Case1, FixtureCase::Case2];

    pub fn name(self) -> &'static str {
        match self {
            FixtureCase::Case1 => "case1",
            FixtureCase::Case2 => "case2",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }

    pub fn file_name(self) -> String {
        format!("{}.txt", self.name())
    }

    pub fn params(self) -> ModelParams {
        match self {
            FixtureCase::Case1 => ModelParams {
                gamma: -1.0,
                lambda: 1.0 / 3.0,
            },
            FixtureCase::Case2 => ModelParams {
                gamma: 1.0,
                lambda: 1.0,
            },
        }
    }

    pub fn closed_form(self) -> Matrix4<f64> {
        match self {
            FixtureCase::Case1 => case1_closed_form(),
            FixtureCase::Case2 => case2_closed_form(),
        }
    }
}

pub fn case1_closed_form() -> Matrix4<f64> {
    Matrix4::new(
        -(5.0f64 / 7.0).sqrt(),
        -(1.0f64 / 35.0).sqrt(),
        0.0,
        3.0 / 35f64.sqrt(),
        0.0,
        3.0 / 10f64.sqrt(),
        0.0,
        1.0 / 10f64.sqrt(),
        0.0,
        0.0,
        1.0,
        0.0,
        (2.0f64 / 7.0).sqrt(),
        -1.0 / 14f64.sqrt(),
        0.0,
        3.0 / 14f64.sqrt(),
    )
}

pub fn case2_closed_form() -> Matrix4<f64> {
    let s17 = 17f64.sqrt();
    let s2 = 2f64.sqrt();
    let ra = (51.0 + 12.0 * s17).sqrt();
    let rc = (51.0 - 12.0 * s17).sqrt();
    let t = 2.0 + s2;
    Matrix4::new(
        -(3.0 + s17) / (2.0 * ra),
        -(4.0 + s17) / ra,
        (5.0 + s17) / (2.0 * ra),
        1.0 / ra,
        -0.5 * (2.0 / 3.0 * t).sqrt(),
        (s2 - 1.0) / 2.0 * (t / 3.0).sqrt(),
        (1.0 - s2) / 2.0 * (2.0 / 3.0 * t).sqrt(),
        0.5 * (t / 3.0).sqrt(),
        (-3.0 + s17) / (2.0 * rc),
        (-4.0 + s17) / rc,
        (5.0 - s17) / (2.0 * rc),
        1.0 / rc,
        1.0 / (3.0 * t).sqrt(),
        -(s2 + 1.0) / (6.0 * t).sqrt(),
        -(s2 + 1.0) / (3.0 * t).sqrt(),
        1.0 / (6.0 * t).sqrt(),
    )
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fixture {
    pub params: ModelParams,
    pub s: Matrix4<f64>,
}

impl Fixture {
    pub fn reference(case: FixtureCase) -> Self {
        Self {
            params: case.params(),
            s: case.closed_form(),
        }
    }
}

/// Default location of the shipped fixture files.
pub fn default_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn format_fixture(fixture: &Fixture, comment: &str) -> String {
    let mut out = String::new();
    for line in comment.lines() {
        let _ = writeln!(out, "# {line}");
    }
    let _ = writeln!(
        out,
        "params {:.16e} {:.16e}",
        fixture.params.gamma, fixture.params.lambda
    );
    for r in 0..4 {
        let row: Vec<String> = (0..4).map(|c| format!("{:.16e}", fixture.s[(r, c)])).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

pub fn parse_fixture(path: &Path, text: &str) -> Result<Fixture> {
    let bad = |msg: String| Error::FixtureParse {
        path: path.to_path_buf(),
        msg,
    };
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| bad("empty file".into()))?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("params") {
        return Err(bad(format!("expected `params <gamma> <lambda>`, got `{header}`")));
    }
    let nums: Vec<f64> = parts
        .map(|p| p.parse::<f64>().map_err(|e| bad(format!("bad number `{p}`: {e}"))))
        .collect::<Result<_>>()?;
    let [gamma, lambda] = nums[..] else {
        return Err(bad("params line needs exactly two numbers".into()));
    };
    let params = ModelParams::new(gamma, lambda).map_err(|e| bad(e.to_string()))?;

    let mut s = Matrix4::zeros();
    for r in 0..4 {
        let line = lines.next().ok_or_else(|| bad(format!("missing row {}", r + 1)))?;
        let row: Vec<f64> = line
            .split_whitespace()
            .map(|p| p.parse::<f64>().map_err(|e| bad(format!("bad number `{p}`: {e}"))))
            .collect::<Result<_>>()?;
        if row.len() != 4 {
            return Err(bad(format!("row {} has {} entries, expected 4", r + 1, row.len())));
        }
        for (c, v) in row.into_iter().enumerate() {
            s[(r, c)] = v;
        }
    }
    if let Some(extra) = lines.next() {
        return Err(bad(format!("unexpected trailing line `{extra}`")));
    }
    Ok(Fixture { params, s })
}

pub fn read_fixture(path: &Path) -> Result<Fixture> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(Error::MissingFixture(path.to_path_buf())),
        Err(e) => return Err(e.into()),
    };
    parse_fixture(path, &text)
}

pub fn write_fixture(path: &Path, fixture: &Fixture, comment: &str) -> Result<()> {
    fs::write(path, format_fixture(fixture, comment))?;
    Ok(())
}

pub fn load_case(dir: &Path, case: FixtureCase) -> Result<Fixture> {
    read_fixture(&dir.join(case.file_name()))
}
