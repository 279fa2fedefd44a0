use crate::lambda::Exp;
use crate::term::Term;

/// λ-terms with `\x. t` and juxtaposition; anything else in constructor form.
pub fn sugar(t: &Term) -> String {
    match Exp::view(t) {
        Some(Exp::Var(a)) => a.to_string(),
        Some(Exp::Lam(a, body)) => format!("\\{a}. {}", sugar(body)),
        Some(Exp::App(m, n)) => {
            let f = match Exp::view(m) {
                Some(Exp::Lam(..)) => format!("({})", sugar(m)),
                _ => sugar(m),
            };
            let x = match Exp::view(n) {
                Some(Exp::Var(_)) | None => sugar(n),
                _ => format!("({})", sugar(n)),
            };
            format!("{f} {x}")
        }
        None => t.to_string(),
    }
}
