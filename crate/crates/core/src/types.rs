//! Simple types: sorts, arrows and (in pairing mode) products.

use std::fmt;
use std::sync::Arc;

/// A simple type. Cheap to clone; compared structurally.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Type(Arc<TypeKind>);

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeKind {
    Sort(Arc<str>),
    Arrow(Type, Type),
    Product(Type, Type),
}

impl Type {
    pub fn sort(name: &str) -> Type {
        Type(Arc::new(TypeKind::Sort(Arc::from(name))))
    }

    pub fn arrow(dom: Type, cod: Type) -> Type {
        Type(Arc::new(TypeKind::Arrow(dom, cod)))
    }

    pub fn product(left: Type, right: Type) -> Type {
        Type(Arc::new(TypeKind::Product(left, right)))
    }

    /// `args[0] => args[1] => ... => result`.
    pub fn arrows(args: impl IntoIterator<Item = Type, IntoIter: DoubleEndedIterator>, result: Type) -> Type {
        args.into_iter().rev().fold(result, |acc, a| Type::arrow(a, acc))
    }

    pub fn kind(&self) -> &TypeKind {
        &self.0
    }

    pub fn sort_name(&self) -> Option<&str> {
        match &*self.0 {
            TypeKind::Sort(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_sort(&self) -> bool {
        matches!(&*self.0, TypeKind::Sort(_))
    }

    pub fn is_arrow(&self) -> bool {
        matches!(&*self.0, TypeKind::Arrow(..))
    }

    pub fn is_product(&self) -> bool {
        matches!(&*self.0, TypeKind::Product(..))
    }

    /// Sorts and products built only from sorts.
    pub fn is_base(&self) -> bool {
        match &*self.0 {
            TypeKind::Sort(_) => true,
            TypeKind::Product(l, r) => l.is_base() && r.is_base(),
            TypeKind::Arrow(..) => false,
        }
    }

    pub fn contains_product(&self) -> bool {
        match &*self.0 {
            TypeKind::Sort(_) => false,
            TypeKind::Product(..) => true,
            TypeKind::Arrow(a, b) => a.contains_product() || b.contains_product(),
        }
    }

    pub fn order(&self) -> usize {
        match &*self.0 {
            TypeKind::Sort(_) => 0,
            TypeKind::Arrow(a, b) => (a.order() + 1).max(b.order()),
            TypeKind::Product(a, b) => a.order().max(b.order()),
        }
    }

    /// Splits `s1 => ... => sn => r` where `r` is not an arrow.
    pub fn uncurry(&self) -> (Vec<Type>, Type) {
        let mut args = Vec::new();
        let mut cur = self.clone();
        loop {
            let next = match &*cur.0 {
                TypeKind::Arrow(a, b) => {
                    args.push(a.clone());
                    b.clone()
                }
                _ => return (args, cur),
            };
            cur = next;
        }
    }

    /// Number of arguments before a non-arrow result.
    pub fn arity(&self) -> usize {
        match &*self.0 {
            TypeKind::Arrow(_, b) => 1 + b.arity(),
            _ => 0,
        }
    }

    /// Drops `n` leading arrow arguments.
    pub fn strip(&self, n: usize) -> Option<Type> {
        let mut cur = self;
        for _ in 0..n {
            match &*cur.0 {
                TypeKind::Arrow(_, b) => cur = b,
                _ => return None,
            }
        }
        Some(cur.clone())
    }

    pub fn domain(&self) -> Option<&Type> {
        match &*self.0 {
            TypeKind::Arrow(a, _) => Some(a),
            _ => None,
        }
    }

    /// Length of the longest arrow chain `s1 => ... => sn => r` anywhere in the type, plus one.
    pub fn chain_width(&self) -> usize {
        let (args, res) = self.uncurry();
        let mut w = args.len() + 1;
        for a in &args {
            w = w.max(a.chain_width());
        }
        if let TypeKind::Product(l, r) = &*res.0 {
            w = w.max(l.chain_width()).max(r.chain_width());
        }
        w
    }

    /// Every sort name occurring in the type, in first-occurrence order.
    pub fn sorts(&self, out: &mut Vec<Arc<str>>) {
        match &*self.0 {
            TypeKind::Sort(s) => {
                if !out.contains(s) {
                    out.push(s.clone());
                }
            }
            TypeKind::Arrow(a, b) | TypeKind::Product(a, b) => {
                a.sorts(out);
                b.sorts(out);
            }
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        // prec 0: anything; 1: left of `=>` or inside `*`; 2: left of `*`
        match &*self.0 {
            TypeKind::Sort(s) => f.write_str(s),
            TypeKind::Arrow(a, b) => {
                if prec > 0 {
                    f.write_str("(")?;
                }
                a.fmt_prec(f, 1)?;
                f.write_str(" => ")?;
                b.fmt_prec(f, 0)?;
                if prec > 0 {
                    f.write_str(")")?;
                }
                Ok(())
            }
            TypeKind::Product(a, b) => {
                if prec > 1 {
                    f.write_str("(")?;
                }
                a.fmt_prec(f, 2)?;
                f.write_str(" * ")?;
                b.fmt_prec(f, 1)?;
                if prec > 1 {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl fmt::Debug for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
