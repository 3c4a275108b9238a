//! Canonical term trees encoding members of functor values.
//!
//! Every value a functor ever produces is an [`Element`]: atoms for ground
//! points, `Star` for adjoined points, tuples for products, tags for
//! coproducts, and `Cls` for orbit classes (the payload is always the
//! minimal representative of its orbit). The derived total order (variant
//! rank, then lexicographic recursion) is what makes finite sets of
//! elements canonical and hence equality-testable.

use std::fmt;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Element {
    Atom(u32),
    Star,
    Tuple(Vec<Element>),
    Tag(String, Box<Element>),
    Cls(Box<Element>),
}

impl Element {
    pub fn atom(n: u32) -> Self {
        Element::Atom(n)
    }

    pub fn tuple(items: Vec<Element>) -> Self {
        Element::Tuple(items)
    }

    pub fn tag(label: impl Into<String>, inner: Element) -> Self {
        Element::Tag(label.into(), Box::new(inner))
    }

    pub fn cls(representative: Element) -> Self {
        Element::Cls(Box::new(representative))
    }

    pub fn as_tuple(&self) -> Option<&[Element]> {
        match self {
            Element::Tuple(items) => Some(items),
            _ => None,
        }
    }

    pub fn as_tag(&self) -> Option<(&str, &Element)> {
        match self {
            Element::Tag(label, inner) => Some((label, inner)),
            _ => None,
        }
    }

    pub fn as_cls(&self) -> Option<&Element> {
        match self {
            Element::Cls(inner) => Some(inner),
            _ => None,
        }
    }

    pub fn expect_tuple(&self) -> &[Element] {
        self.as_tuple().expect("element is not a tuple")
    }

    pub fn expect_tag(&self) -> (&str, &Element) {
        self.as_tag().expect("element is not tagged")
    }

    pub fn expect_cls(&self) -> &Element {
        self.as_cls().expect("element is not an orbit class")
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Atom(n) => write!(f, "{n}"),
            Element::Star => write!(f, "*"),
            Element::Tuple(items) => {
                write!(f, "(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{item}")?;
                }
                write!(f, ")")
            }
            Element::Tag(label, inner) => write!(f, "{label}:{inner}"),
            Element::Cls(inner) => write!(f, "[{inner}]"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variant_rank_order() {
        let atom = Element::atom(7);
        let star = Element::Star;
        let tuple = Element::tuple(vec![]);
        let tag = Element::tag("0", Element::atom(0));
        let cls = Element::cls(Element::atom(0));
        assert!(atom < star);
        assert!(star < tuple);
        assert!(tuple < tag);
        assert!(tag < cls);
    }

    #[test]
    fn lexicographic_within_variant() {
        assert!(Element::atom(0) < Element::atom(1));
        assert!(
            Element::tuple(vec![Element::atom(0)])
                < Element::tuple(vec![Element::atom(0), Element::atom(0)])
        );
        assert!(Element::tag("0", Element::atom(5)) < Element::tag("1", Element::atom(0)));
    }

    #[test]
    fn display_round_trips_visually() {
        let e = Element::tag(
            "1",
            Element::tuple(vec![Element::atom(2), Element::Star]),
        );
        assert_eq!(e.to_string(), "1:(2,*)");
    }
}
