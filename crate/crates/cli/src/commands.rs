//! Single-shot subcommands and the input resolution they share with campaigns.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde_json::json;
use tensorword::config::{Limits, CHAR_TOL, DEFAULT_ORDER_CAP};
use tensorword::gmf::{CharSource, FunctionalSpec, MatrixFunctional};
use tensorword::induced::{induced_operator, SymmetryClass};
use tensorword::matcore::{GeneralMatrix, MatrixJson};
use tensorword::symgroup::{
    builtin_character, builtin_group, validate_character, CharSpec, Character, CharacterTableJson,
    GroupSpec, PermutationGroup,
};
use tensorword::words::{enumerate_words, surjective_count, WordFilter};
use tensorword::Complex64;

use crate::args::{GmfEvalArgs, InducedEvalArgs, WordsCountArgs, WordsListArgs};
use crate::Failure;

pub fn read_matrix(path: &Path) -> Result<GeneralMatrix, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let parsed: MatrixJson =
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok(GeneralMatrix::try_from(parsed)?)
}

pub fn char_source(text: &str) -> Result<CharSource, Failure> {
    Ok(match text.trim().strip_prefix("table:") {
        Some(path) => CharSource::TableFile(path.to_string()),
        None => CharSource::Builtin(CharSpec::parse_builtin(text)?),
    })
}

pub fn resolve_group(spec: &GroupSpec) -> Result<Arc<PermutationGroup>, Failure> {
    Ok(Arc::new(builtin_group(spec, None, DEFAULT_ORDER_CAP)?))
}

pub fn resolve_character(group: &PermutationGroup, source: &CharSource) -> Result<Character, Failure> {
    match source {
        CharSource::Builtin(spec) => Ok(builtin_character(group, spec)?),
        CharSource::TableFile(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{path}: {e}")))?;
            let table: CharacterTableJson =
                serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{path}: {e}")))?;
            let values = table.values.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
            Ok(Character::from_values(group, values, true, format!("table:{path}"))?)
        }
    }
}

/// Rejects characters that fail validation or do not claim irreducibility,
/// except that `allow_reducible` waives the irreducibility requirement.
pub fn require_valid_character(chi: &Character, group: &PermutationGroup, allow_reducible: bool) -> Result<(), Failure> {
    if !allow_reducible && !chi.claims_irreducible() {
        return Err(Failure::Usage(format!("character {} is not irreducible", chi.label())));
    }
    let v = validate_character(chi, group, CHAR_TOL)?;
    let failed: Vec<_> = v
        .checks
        .iter()
        .filter(|c| !c.passed && !(allow_reducible && c.name == "irreducible"))
        .map(|c| format!("{} ({})", c.name, c.value))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Usage(format!(
            "character {} fails: {}",
            chi.label(),
            failed.join(", ")
        )))
    }
}

pub fn build_functional(spec: &FunctionalSpec, allow_reducible: bool) -> Result<MatrixFunctional, Failure> {
    Ok(match spec {
        FunctionalSpec::Det => MatrixFunctional::Det,
        FunctionalSpec::Per => MatrixFunctional::Per,
        FunctionalSpec::Gmf { group, character } => {
            let g = resolve_group(group)?;
            let chi = resolve_character(&g, character)?;
            MatrixFunctional::gmf(g, chi, allow_reducible)?
        }
    })
}

pub fn format_complex(z: Complex64) -> String {
    if z.im.abs() <= 1e-12 * z.norm().max(1.0) {
        format!("{}", z.re)
    } else {
        let sign = if z.im < 0.0 { '-' } else { '+' };
        format!("{}{sign}{}i", z.re, z.im.abs())
    }
}

pub fn words_count(a: &WordsCountArgs) -> Result<u8, Failure> {
    println!("{}", surjective_count(a.k as usize, a.m as usize)?);
    Ok(0)
}

pub fn words_list(a: &WordsListArgs) -> Result<u8, Failure> {
    let limits = Limits {
        enum_cap: a.enum_cap,
        ..Limits::default()
    };
    let filter = if a.surjective { WordFilter::Surjective } else { WordFilter::All };
    for w in enumerate_words(a.k as usize, a.m as usize, filter, &limits)? {
        println!("{w}");
    }
    Ok(0)
}

pub fn gmf_eval(a: &GmfEvalArgs) -> Result<u8, Failure> {
    let x = read_matrix(&a.matrix)?;
    let spec: FunctionalSpec = a.func.parse()?;
    let f = build_functional(&spec, a.allow_reducible)?;
    println!("{}", format_complex(f.evaluate(&x)?));
    Ok(0)
}

pub fn induced_eval(a: &InducedEvalArgs) -> Result<u8, Failure> {
    let x = read_matrix(&a.matrix)?;
    if !x.is_square() {
        return Err(Failure::Usage(format!("matrix must be square, got {}x{}", x.rows(), x.cols())));
    }
    let g = resolve_group(&a.group.parse()?)?;
    let chi = resolve_character(&g, &char_source(&a.character)?)?;
    require_valid_character(&chi, &g, false)?;
    let limits = Limits {
        max_dim: a.max_dim,
        ..Limits::default()
    };
    let class = SymmetryClass::new(g, chi, x.rows(), &limits)?;
    let induced = match class.dimension() {
        0 => None,
        _ => Some(MatrixJson::from(&induced_operator(&x, &class, &limits)?)),
    };
    let out = json!({ "dimension": class.dimension(), "induced": induced });
    println!("{}", serde_json::to_string_pretty(&out).expect("plain JSON values serialize"));
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_formatting() {
        assert_eq!(format_complex(Complex64::new(-2.0, 0.0)), "-2");
        assert_eq!(format_complex(Complex64::new(1.5, -0.25)), "1.5-0.25i");
        assert_eq!(format_complex(Complex64::new(0.0, 1.0)), "0+1i");
    }

    #[test]
    fn reducible_characters_need_the_flag() {
        let g = resolve_group(&"sym:3".parse().unwrap()).unwrap();
        let t = builtin_character(&g, &CharSpec::Trivial).unwrap();
        let s = builtin_character(&g, &CharSpec::Sign).unwrap();
        let sum = t.pointwise_sum(&s).unwrap();
        assert!(require_valid_character(&sum, &g, false).is_err());
        assert!(require_valid_character(&sum, &g, true).is_ok());
        assert!(require_valid_character(&t, &g, false).is_ok());
    }
}
