mod common;

use common::*;
use framelet::moments::{linear_phase_moment_order, sum_rule_order, vanishing_moment_order, Order};

#[test]
fn low_pass_fixtures_are_interpolatory_with_four_sum_rules() {
    for (name, ctx) in [
        ("ex41_a", m_sqrt2()),
        ("ex41_ta", m_sqrt2()),
        ("ex42_a", two_i2()),
        ("ex42_ta", two_i2()),
        ("ex43_a", m_sqrt3()),
    ] {
        let a = fixture(name);
        assert!(a.is_normalized(), "{name}");
        assert!(ctx.is_interpolatory(&a), "{name}");
        assert_eq!(sum_rule_order(&a, &ctx, 16), Order::Exact(4), "{name}");
        assert!(linear_phase_moment_order(&a, 16).value() >= 4, "{name}");
    }
}

#[test]
fn printed_first_high_pass_filters() {
    let b1 = fixture("ex41_b1");
    assert_eq!(vanishing_moment_order(&b1, 16), Order::Exact(4));
    assert_eq!(vanishing_moment_order(&fixture("ex41_tb1"), 16), Order::Exact(4));
    for name in ["ex41_b3", "ex41_tb3", "ex41_b4", "ex41_tb4", "ex41_b5", "ex41_tb5"] {
        assert_eq!(vanishing_moment_order(&fixture(name), 16), Order::Exact(2), "{name}");
    }
}
