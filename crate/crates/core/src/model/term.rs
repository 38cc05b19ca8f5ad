//! Terms, Skolem symbols and the term order used to direct EGD merges.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

/// An interned-by-value name. Cloning is a reference count bump.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: impl AsRef<str>) -> Self {
        Symbol(Arc::from(name.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<String> for Symbol {
    fn from(s: String) -> Self {
        Symbol::new(s)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

/// Where a Skolem function symbol came from: the rule that introduced it and the
/// existential variable it replaces.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SkolemOrigin {
    pub rule: usize,
    pub variable: Symbol,
}

/// A Skolem function symbol `f_<rule>_<var>`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SkolemSymbol(Arc<SkolemData>);

#[derive(PartialEq, Eq, Hash)]
struct SkolemData {
    name: Symbol,
    arity: usize,
    origin: SkolemOrigin,
}

impl SkolemSymbol {
    pub fn new(name: impl AsRef<str>, arity: usize, origin: SkolemOrigin) -> Self {
        SkolemSymbol(Arc::new(SkolemData {
            name: Symbol::new(name),
            arity,
            origin,
        }))
    }

    /// The symbol assigned to existential `variable` of rule `rule`.
    pub fn for_existential(rule: usize, variable: &Symbol, arity: usize) -> Self {
        Self::new(
            format!("f_{}_{}", rule, variable),
            arity,
            SkolemOrigin {
                rule,
                variable: variable.clone(),
            },
        )
    }

    pub fn name(&self) -> &Symbol {
        &self.0.name
    }

    pub fn arity(&self) -> usize {
        self.0.arity
    }

    pub fn origin(&self) -> &SkolemOrigin {
        &self.0.origin
    }
}

impl fmt::Debug for SkolemSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.name, self.0.arity)
    }
}

impl Ord for SkolemSymbol {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0
            .name
            .cmp(&other.0.name)
            .then(self.0.arity.cmp(&other.0.arity))
            .then_with(|| self.0.origin.cmp(&other.0.origin))
    }
}

impl PartialOrd for SkolemSymbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A functional term `f(t1, ..., tn)` over a Skolem symbol.
#[derive(PartialEq, Eq, Hash)]
pub struct FunctionalTerm {
    symbol: SkolemSymbol,
    args: Vec<Term>,
    depth: usize,
    ground: bool,
}

impl FunctionalTerm {
    pub fn symbol(&self) -> &SkolemSymbol {
        &self.symbol
    }

    pub fn args(&self) -> &[Term] {
        &self.args
    }
}

/// A term: constant, variable, or Skolem functional term.
///
/// Terms are immutable values compared structurally. [`Ord`] on terms is the
/// strict total order used when merging terms: depth first, then constants
/// before variables before functional terms, then the symbol name, then the
/// arguments left to right.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Constant(Symbol),
    Variable(Symbol),
    Functional(Arc<FunctionalTerm>),
}

/// Name of the distinguished constant used by critical instances.
pub const STAR: &str = "⋆";

impl Term {
    pub fn constant(name: impl AsRef<str>) -> Self {
        Term::Constant(Symbol::new(name))
    }

    pub fn variable(name: impl AsRef<str>) -> Self {
        Term::Variable(Symbol::new(name))
    }

    pub fn star() -> Self {
        Term::constant(STAR)
    }

    /// Builds `symbol(args)`.
    ///
    /// Panics if the argument count differs from the symbol's arity.
    pub fn functional(symbol: SkolemSymbol, args: Vec<Term>) -> Self {
        assert_eq!(
            symbol.arity(),
            args.len(),
            "arity mismatch for Skolem symbol {:?}",
            symbol
        );
        let depth = 1 + args.iter().map(Term::depth).max().unwrap_or(0);
        let ground = args.iter().all(Term::is_ground);
        Term::Functional(Arc::new(FunctionalTerm {
            symbol,
            args,
            depth,
            ground,
        }))
    }

    /// 1 for constants and variables, one more than the deepest argument otherwise.
    pub fn depth(&self) -> usize {
        match self {
            Term::Constant(_) | Term::Variable(_) => 1,
            Term::Functional(f) => f.depth,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Constant(_) => true,
            Term::Variable(_) => false,
            Term::Functional(f) => f.ground,
        }
    }

    pub fn is_variable(&self) -> bool {
        matches!(self, Term::Variable(_))
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Term::Constant(_))
    }

    pub fn as_variable(&self) -> Option<&Symbol> {
        match self {
            Term::Variable(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_functional(&self) -> Option<&FunctionalTerm> {
        match self {
            Term::Functional(f) => Some(f),
            _ => None,
        }
    }

    /// True iff some functional node's symbol occurs again strictly below it.
    pub fn is_cyclic(&self) -> bool {
        fn walk<'a>(t: &'a Term, path: &mut Vec<&'a SkolemSymbol>) -> bool {
            let Term::Functional(f) = t else {
                return false;
            };
            if path.contains(&&f.symbol) {
                return true;
            }
            path.push(&f.symbol);
            let found = f.args.iter().any(|a| walk(a, path));
            path.pop();
            found
        }
        walk(self, &mut Vec::new())
    }

    /// Replaces every constant, at any nesting level, with `⋆`.
    pub fn starred(&self) -> Term {
        match self {
            Term::Constant(_) => Term::star(),
            Term::Variable(_) => self.clone(),
            Term::Functional(f) => {
                Term::functional(f.symbol.clone(), f.args.iter().map(Term::starred).collect())
            }
        }
    }

    /// Calls `visit` on this term and every subterm, outermost first.
    pub fn visit_subterms<'a>(&'a self, visit: &mut impl FnMut(&'a Term)) {
        visit(self);
        if let Term::Functional(f) = self {
            for a in &f.args {
                a.visit_subterms(visit);
            }
        }
    }

    fn kind_rank(&self) -> u8 {
        match self {
            Term::Constant(_) => 0,
            Term::Variable(_) => 1,
            Term::Functional(_) => 2,
        }
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Term::Functional(a), Term::Functional(b)) if Arc::ptr_eq(a, b) => Ordering::Equal,
            _ => self
                .depth()
                .cmp(&other.depth())
                .then(self.kind_rank().cmp(&other.kind_rank()))
                .then_with(|| match (self, other) {
                    (Term::Constant(a), Term::Constant(b))
                    | (Term::Variable(a), Term::Variable(b)) => a.cmp(b),
                    (Term::Functional(a), Term::Functional(b)) => {
                        a.symbol.cmp(&b.symbol).then_with(|| a.args.cmp(&b.args))
                    }
                    _ => unreachable!("kind ranks are equal"),
                }),
        }
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The term order ≺, as a three-way comparison.
pub fn term_compare(t: &Term, u: &Term) -> Ordering {
    t.cmp(u)
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Constant(c) => write!(f, "{}", c),
            Term::Variable(v) => write!(f, "{}", v),
            Term::Functional(t) => {
                write!(f, "{}(", t.symbol.name())?;
                for (i, a) in t.args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{}", a)?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(name: &str, arity: usize) -> SkolemSymbol {
        SkolemSymbol::new(
            name,
            arity,
            SkolemOrigin {
                rule: 0,
                variable: Symbol::new(name),
            },
        )
    }

    fn app(s: &SkolemSymbol, args: Vec<Term>) -> Term {
        Term::functional(s.clone(), args)
    }

    #[test]
    fn depth_examples() {
        let f1 = sym("f", 1);
        let f2 = sym("f", 2);
        let g = sym("g", 1);
        assert_eq!(Term::constant("a").depth(), 1);
        assert_eq!(Term::variable("X").depth(), 1);
        assert_eq!(app(&f1, vec![Term::constant("a")]).depth(), 2);
        let t = app(
            &f2,
            vec![Term::constant("a"), app(&g, vec![Term::constant("b")])],
        );
        assert_eq!(t.depth(), 3);
    }

    #[test]
    fn compare_examples() {
        let f = sym("f", 1);
        let a = Term::constant("a");
        let fa = app(&f, vec![a.clone()]);
        assert_eq!(term_compare(&a, &fa), Ordering::Less);
        assert_eq!(term_compare(&fa, &fa.clone()), Ordering::Equal);
        let b = Term::constant("b");
        assert_eq!(term_compare(&a, &b), Ordering::Less);
        assert_eq!(term_compare(&b, &a), Ordering::Greater);
    }

    #[test]
    fn cyclic_examples() {
        let f = sym("f", 1);
        let g = sym("g", 1);
        let g2 = sym("g", 2);
        let star = Term::star();
        assert!(app(&f, vec![app(&f, vec![star.clone()])]).is_cyclic());
        assert!(!app(&f, vec![app(&g, vec![star.clone()])]).is_cyclic());
        let a = Term::constant("a");
        let t = app(
            &g2,
            vec![
                app(&f, vec![a.clone()]),
                app(
                    &f,
                    vec![Term::functional(g2.clone(), vec![a.clone(), a.clone()])],
                ),
            ],
        );
        assert!(t.is_cyclic());
        assert!(!a.is_cyclic());
        // a cyclic subterm below a non-repeating root
        assert!(app(&g, vec![app(&f, vec![app(&f, vec![a])])]).is_cyclic());
    }

    #[test]
    #[should_panic(expected = "arity mismatch")]
    fn functional_arity_is_checked() {
        let f = sym("f", 2);
        let _ = Term::functional(f, vec![Term::constant("a")]);
    }

    #[test]
    fn starred_replaces_nested_constants() {
        let f = sym("f", 2);
        let t = app(&f, vec![Term::constant("a"), Term::constant("b")]);
        assert_eq!(t.starred().to_string(), "f(⋆,⋆)");
    }
}
