//! Tiny surface syntax for quotient-chart forms passed on the command
//! line, e.g. `x1*dx1^dx0 - 2*dx2^dx0`. `^` wedges differentials and also
//! raises coordinate powers (`x1^2`); `*` separates coefficient factors.
//! The named forms `gvl` and `cl1` expand to the canonical representatives
//! in quotient coordinates.

use anyhow::{anyhow, bail, Result};

use folcc_core::frames::{cl1_form, gvl_form, Chart, CoordForm};
use folcc_core::multipoly::MultiPoly;
use folcc_core::{qi, Q, Z};

pub fn parse_form(src: &str) -> Result<CoordForm> {
    match src.trim() {
        "gvl" | "theta0^theta1^theta2" => {
            return Ok(gvl_form().to_x_chart().expect("descends"))
        }
        "cl1" | "theta2^theta0" => {
            return Ok(cl1_form().to_x_chart().expect("descends"))
        }
        _ => {}
    }
    let mut out = CoordForm::zero(Chart::X);
    for (sign, term) in split_signed_terms(src)? {
        let parsed = parse_term(term)?;
        out = out.add(&if sign < 0 { parsed.neg() } else { parsed });
    }
    Ok(out)
}

fn split_signed_terms(src: &str) -> Result<Vec<(i64, &str)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0usize;
    while i < bytes.len() && bytes[i].is_ascii_whitespace() {
        i += 1;
    }
    let mut sign = 1i64;
    if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
        sign = if bytes[i] == b'-' { -1 } else { 1 };
        i += 1;
    }
    let mut start = i;
    while i <= bytes.len() {
        if i == bytes.len() || bytes[i] == b'+' || bytes[i] == b'-' {
            let term = src[start..i].trim();
            if term.is_empty() {
                bail!("empty term in form specification `{src}`");
            }
            out.push((sign, term));
            if i < bytes.len() {
                sign = if bytes[i] == b'-' { -1 } else { 1 };
            }
            i += 1;
            start = i;
        } else {
            i += 1;
        }
    }
    Ok(out)
}

fn rational(p: i64, q: i64) -> Result<Q> {
    if q == 0 {
        bail!("zero denominator in rational literal");
    }
    Ok(Q::new(Z::from(p), Z::from(q)))
}

fn parse_term(term: &str) -> Result<CoordForm> {
    let mut coeff: MultiPoly<Q> = MultiPoly::one();
    let mut indices: Vec<u16> = Vec::new();
    for factor in term.split('*') {
        let factor = factor.trim();
        if factor.is_empty() {
            bail!("empty factor in `{term}`");
        }
        if factor.starts_with("dx") {
            for dx in factor.split('^') {
                let dx = dx.trim();
                let idx = dx
                    .strip_prefix("dx")
                    .ok_or_else(|| anyhow!("expected a dx factor in `{factor}`"))?
                    .parse::<u16>()
                    .map_err(|_| anyhow!("bad differential index in `{dx}`"))?;
                indices.push(idx);
            }
        } else if let Some(body) = factor.strip_prefix('x') {
            let (var, power) = match body.split_once('^') {
                Some((v, p)) => (
                    v.parse::<u16>().map_err(|_| anyhow!("bad coordinate `{factor}`"))?,
                    p.parse::<i32>().map_err(|_| anyhow!("bad power `{factor}`"))?,
                ),
                None => (
                    body.parse::<u16>().map_err(|_| anyhow!("bad coordinate `{factor}`"))?,
                    1,
                ),
            };
            coeff = coeff.mul(&MultiPoly::var_pow(var, power));
        } else {
            let value = match factor.split_once('/') {
                Some((p, q)) => rational(
                    p.trim().parse().map_err(|_| anyhow!("bad number `{factor}`"))?,
                    q.trim().parse().map_err(|_| anyhow!("bad number `{factor}`"))?,
                )?,
                None => qi(factor
                    .trim()
                    .parse()
                    .map_err(|_| anyhow!("bad number `{factor}`"))?),
            };
            coeff = coeff.scale(&value);
        }
    }
    Ok(CoordForm::term(Chart::X, &indices, coeff))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_forms_expand() {
        let gvl = parse_form("gvl").unwrap();
        let direct = parse_form("-1*dx0^dx1^dx2").unwrap();
        assert_eq!(gvl, direct);
        let cl1 = parse_form("cl1").unwrap();
        assert_eq!(cl1, parse_form("dx2^dx0").unwrap());
    }

    #[test]
    fn coefficients_and_wedges() {
        let form = parse_form("x1^2*dx1^dx2 + 1/3*dx0").unwrap();
        let expect = CoordForm::term(Chart::X, &[1, 2], MultiPoly::var_pow(1, 2)).add(
            &CoordForm::term(
                Chart::X,
                &[0],
                MultiPoly::constant(rational(1, 3).unwrap()),
            ),
        );
        assert_eq!(form, expect);
    }

    #[test]
    fn subtraction_between_terms() {
        let form = parse_form("dx2^dx0 - dx2^dx0").unwrap();
        assert!(form.is_zero());
    }

    #[test]
    fn leading_minus() {
        let form = parse_form("-dx0").unwrap();
        assert_eq!(
            form,
            CoordForm::term(Chart::X, &[0], MultiPoly::one().neg())
        );
    }
}
