//! S-expression syntax.
//!
//! ```text
//! term    := 0 | NAME | (+ term term) | (- term) | (* INT term) | (abs term)
//! formula := true | false | (< term term) | (<= term term) | (= term term)
//!          | (div PRIME term) | (not formula) | (and formula*) | (or formula*)
//!          | (-> formula formula) | (<-> formula formula)
//!          | (forall NAME formula) | (exists NAME formula)
//! top     := formula | (free (NAME*) formula)
//! ```

use super::{Formula, FormulaError, OagFormula, Term};

pub(super) fn print(f: &OagFormula) -> String {
    let mut out = String::new();
    if f.free.is_empty() {
        formula(&f.body, &mut out);
    } else {
        out.push_str("(free (");
        out.push_str(&f.free.join(" "));
        out.push_str(") ");
        formula(&f.body, &mut out);
        out.push(')');
    }
    out
}

fn term(t: &Term, out: &mut String) {
    match t {
        Term::Var(v) => out.push_str(v),
        Term::Zero => out.push('0'),
        Term::Add(a, b) => {
            out.push_str("(+ ");
            term(a, out);
            out.push(' ');
            term(b, out);
            out.push(')');
        }
        Term::Neg(a) => {
            out.push_str("(- ");
            term(a, out);
            out.push(')');
        }
        Term::Scale(c, a) => {
            out.push_str(&format!("(* {c} "));
            term(a, out);
            out.push(')');
        }
        Term::Abs(a) => {
            out.push_str("(abs ");
            term(a, out);
            out.push(')');
        }
    }
}

fn formula(f: &Formula, out: &mut String) {
    let head = |name: &str, out: &mut String| {
        out.push('(');
        out.push_str(name);
    };
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Lt(a, b) | Formula::Le(a, b) | Formula::Eq(a, b) => {
            let op = match f {
                Formula::Lt(..) => "<",
                Formula::Le(..) => "<=",
                _ => "=",
            };
            head(op, out);
            out.push(' ');
            term(a, out);
            out.push(' ');
            term(b, out);
            out.push(')');
        }
        Formula::DivP(p, t) => {
            head(&format!("div {p}"), out);
            out.push(' ');
            term(t, out);
            out.push(')');
        }
        Formula::Not(a) => {
            head("not", out);
            out.push(' ');
            formula(a, out);
            out.push(')');
        }
        Formula::And(fs) | Formula::Or(fs) => {
            head(if matches!(f, Formula::And(_)) { "and" } else { "or" }, out);
            for g in fs {
                out.push(' ');
                formula(g, out);
            }
            out.push(')');
        }
        Formula::Implies(a, b) | Formula::Iff(a, b) => {
            head(if matches!(f, Formula::Implies(..)) { "->" } else { "<->" }, out);
            out.push(' ');
            formula(a, out);
            out.push(' ');
            formula(b, out);
            out.push(')');
        }
        Formula::Forall(x, a) | Formula::Exists(x, a) => {
            head(if matches!(f, Formula::Forall(..)) { "forall" } else { "exists" }, out);
            out.push(' ');
            out.push_str(x);
            out.push(' ');
            formula(a, out);
            out.push(')');
        }
    }
}

#[derive(Debug)]
enum Sx {
    Atom(String),
    List(Vec<Sx>),
}

fn tokenize(s: &str) -> Vec<String> {
    s.replace('(', " ( ")
        .replace(')', " ) ")
        .split_whitespace()
        .map(str::to_string)
        .collect()
}

fn read(tokens: &[String], pos: &mut usize) -> Result<Sx, FormulaError> {
    let tok = tokens
        .get(*pos)
        .ok_or_else(|| FormulaError::Parse("unexpected end of input".into()))?;
    *pos += 1;
    match tok.as_str() {
        "(" => {
            let mut items = Vec::new();
            loop {
                match tokens.get(*pos).map(String::as_str) {
                    Some(")") => {
                        *pos += 1;
                        return Ok(Sx::List(items));
                    }
                    Some(_) => items.push(read(tokens, pos)?),
                    None => return Err(FormulaError::Parse("unbalanced parenthesis".into())),
                }
            }
        }
        ")" => Err(FormulaError::Parse("unexpected ')'".into())),
        _ => Ok(Sx::Atom(tok.clone())),
    }
}

fn err<T>(msg: impl Into<String>) -> Result<T, FormulaError> {
    Err(FormulaError::Parse(msg.into()))
}

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
        && !matches!(s, "true" | "false")
}

fn name(sx: &Sx) -> Result<String, FormulaError> {
    match sx {
        Sx::Atom(a) if is_name(a) => Ok(a.clone()),
        other => err(format!("expected a variable name, found {other:?}")),
    }
}

fn parse_term(sx: &Sx) -> Result<Term, FormulaError> {
    match sx {
        Sx::Atom(a) if a == "0" => Ok(Term::Zero),
        Sx::Atom(_) => Ok(Term::Var(name(sx)?)),
        Sx::List(items) => match items.as_slice() {
            [Sx::Atom(op), a, b] if op == "+" => Ok(parse_term(a)?.add(parse_term(b)?)),
            [Sx::Atom(op), a] if op == "-" => Ok(Term::Neg(Box::new(parse_term(a)?))),
            [Sx::Atom(op), Sx::Atom(c), a] if op == "*" => {
                let c: i64 = c.parse().map_err(|_| FormulaError::Parse(format!("bad coefficient {c}")))?;
                Ok(parse_term(a)?.scale(c))
            }
            [Sx::Atom(op), a] if op == "abs" => Ok(parse_term(a)?.abs()),
            _ => err(format!("malformed term {sx:?}")),
        },
    }
}

fn parse_formula(sx: &Sx) -> Result<Formula, FormulaError> {
    match sx {
        Sx::Atom(a) if a == "true" => Ok(Formula::True),
        Sx::Atom(a) if a == "false" => Ok(Formula::False),
        Sx::Atom(a) => err(format!("unexpected atom {a}")),
        Sx::List(items) => {
            let Some(Sx::Atom(op)) = items.first() else {
                return err("formula must start with an operator");
            };
            let args = &items[1..];
            let two_terms = || -> Result<(Term, Term), FormulaError> {
                match args {
                    [a, b] => Ok((parse_term(a)?, parse_term(b)?)),
                    _ => err(format!("{op} takes two terms")),
                }
            };
            match op.as_str() {
                "<" => two_terms().map(|(a, b)| Formula::Lt(a, b)),
                "<=" => two_terms().map(|(a, b)| Formula::Le(a, b)),
                "=" => two_terms().map(|(a, b)| Formula::Eq(a, b)),
                "div" => match args {
                    [Sx::Atom(p), t] => {
                        let p: u32 = p.parse().map_err(|_| FormulaError::Parse(format!("bad prime {p}")))?;
                        Ok(Formula::DivP(p, parse_term(t)?))
                    }
                    _ => err("div takes a prime and a term"),
                },
                "not" => match args {
                    [a] => Ok(parse_formula(a)?.not()),
                    _ => err("not takes one formula"),
                },
                "and" | "or" => {
                    let fs = args.iter().map(parse_formula).collect::<Result<Vec<_>, _>>()?;
                    Ok(if op == "and" { Formula::And(fs) } else { Formula::Or(fs) })
                }
                "->" | "<->" => match args {
                    [a, b] => {
                        let (a, b) = (Box::new(parse_formula(a)?), Box::new(parse_formula(b)?));
                        Ok(if op == "->" { Formula::Implies(a, b) } else { Formula::Iff(a, b) })
                    }
                    _ => err(format!("{op} takes two formulas")),
                },
                "forall" | "exists" => match args {
                    [x, body] => {
                        let (x, body) = (name(x)?, Box::new(parse_formula(body)?));
                        Ok(if op == "forall" { Formula::Forall(x, body) } else { Formula::Exists(x, body) })
                    }
                    _ => err(format!("{op} takes a variable and a formula")),
                },
                _ => err(format!("unknown operator {op}")),
            }
        }
    }
}

pub(super) fn parse(s: &str) -> Result<OagFormula, FormulaError> {
    let tokens = tokenize(s);
    let mut pos = 0;
    let sx = read(&tokens, &mut pos)?;
    if pos != tokens.len() {
        return err("trailing input");
    }
    if let Sx::List(items) = &sx {
        if let [Sx::Atom(head), Sx::List(vars), body] = items.as_slice() {
            if head == "free" {
                let free = vars.iter().map(name).collect::<Result<Vec<_>, _>>()?;
                return Ok(OagFormula {
                    free,
                    body: parse_formula(body)?,
                });
            }
        }
    }
    Ok(OagFormula {
        free: Vec::new(),
        body: parse_formula(&sx)?,
    })
}

#[cfg(test)]
mod tests {
    use super::super::*;

    #[test]
    fn round_trips() {
        for p in [2, 3, 5] {
            for f in [
                p_regularity_sentence(p),
                p_antiregularity_sentence(p),
                delta0_membership(p),
                delta_gamma_membership(p),
            ] {
                let s = f.to_sexpr();
                let back = OagFormula::from_sexpr(&s).unwrap();
                assert_eq!(back, f);
                assert_eq!(back.to_sexpr(), s);
                assert_eq!(OagFormula::from_json(&f.to_json()).unwrap(), f);
            }
        }
    }

    #[test]
    fn printed_shape() {
        let s = delta0_membership(2).to_sexpr();
        assert_eq!(
            s,
            "(free (g) (exists e (forall a (-> (< (abs a) (abs g)) (not (div 2 (+ e (- a))))))))"
        );
    }

    #[test]
    fn rejects_garbage() {
        assert!(OagFormula::from_sexpr("(< x").is_err());
        assert!(OagFormula::from_sexpr("(frob x y)").is_err());
        assert!(OagFormula::from_sexpr("(< x 0)").is_err());
        assert!(OagFormula::from_sexpr("(free (x) (< x 0)) extra").is_err());
    }
}
