use crate::kernel::{KernelPoly, KernelVar, SymbolJet};
use crate::parse::{parse_polynomial, ParseError};
use crate::sphere::{SphereError, SphereSymbol, D_MAX};

/// A parsed symbol: ambient sphere variables or jet variables `z_j, z̄_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParsedSymbol {
    Sphere(SphereSymbol),
    Jet(SymbolJet),
}

fn jet_var(name: &str) -> Option<(bool, usize)> {
    if let Some(d) = name.strip_prefix("zbar") {
        return d.parse::<usize>().ok().filter(|&j| j >= 1).map(|j| (true, j - 1));
    }
    name.strip_prefix('z')?.parse::<usize>().ok().filter(|&j| j >= 1).map(|j| (false, j - 1))
}

/// Largest coordinate index mentioned by `z<j>`/`zbar<j>`-style names.
fn jet_dimension(text: &str) -> usize {
    text.split(|c: char| !c.is_ascii_alphanumeric())
        .filter_map(jet_var)
        .map(|(_, j)| j + 1)
        .max()
        .unwrap_or(0)
}

/// Sphere symbols use `x1, x2, x3`; jets use `z1.., zbar1..`. Sphere symbols
/// are normalized on `S²` and limited to degree `D_MAX`.
pub fn symbol_parse(text: &str) -> Result<ParsedSymbol, SphereError> {
    let n = jet_dimension(text);
    let mentions_x = text.split(|c: char| !c.is_ascii_alphanumeric()).any(|w| w.starts_with('x'));
    if n == 0 || mentions_x {
        let s = SphereSymbol::parse(text)?;
        s.check_degree(D_MAX)?;
        return Ok(ParsedSymbol::Sphere(s));
    }
    Ok(ParsedSymbol::Jet(parse_jet(text, n)?))
}

/// Jet in `n` complex coordinates.
pub fn parse_jet(text: &str, n: usize) -> Result<SymbolJet, ParseError> {
    let poly = parse_polynomial(text, 2 * n, |name| {
        jet_var(name).filter(|&(_, j)| j < n).map(|(bar, j)| if bar { n + j } else { j })
    })?;
    Ok(SymbolJet::from_poly(n, poly))
}

/// Kernel polynomial in `z<j>, zbar<j>, zp<j>, zbarp<j>`.
pub fn parse_kernel_poly(text: &str, n: usize) -> Result<KernelPoly, ParseError> {
    let slot = |v: KernelVar| match v {
        KernelVar::Z(j) if j < n => Some(j),
        KernelVar::ZBar(j) if j < n => Some(n + j),
        KernelVar::ZPrime(j) if j < n => Some(2 * n + j),
        KernelVar::ZBarPrime(j) if j < n => Some(3 * n + j),
        _ => None,
    };
    let poly = parse_polynomial(text, 4 * n, |name| KernelVar::parse(name).and_then(slot))?;
    Ok(KernelPoly::from_poly(n, poly))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dispatch() {
        assert_eq!(symbol_parse("x3").unwrap(), ParsedSymbol::Sphere(SphereSymbol::coordinate(2)));
        match symbol_parse("x1^2 - x2^2").unwrap() {
            ParsedSymbol::Sphere(s) => assert_eq!(s.degree(), 2),
            other => panic!("{other:?}"),
        }
        assert!(symbol_parse("x4").is_err());
        assert!(matches!(symbol_parse("x1^5"), Err(SphereError::DegreeTooHigh { .. })));
        match symbol_parse("z1*zbar2 + zbar1*z2").unwrap() {
            ParsedSymbol::Jet(j) => {
                assert_eq!(j.n(), 2);
                assert!(j.is_real());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn kernel_polys() {
        let q = parse_kernel_poly("z1*zbarp1 + 2/3", 1).unwrap();
        assert_eq!(q, &(&KernelPoly::z(1, 0) * &KernelPoly::zbarp(1, 0)) + &KernelPoly::constant(1, crate::exact::GaussianRational::real(crate::exact::rat(2, 3))));
        assert!(parse_kernel_poly("z2", 1).is_err());
    }
}
