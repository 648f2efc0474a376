//! Parse a complex-valued expression and evaluate it with plain numbers and with jets.

use paraplex::expr::{self, BindingSet, ChartBinding, ExprField};
use paraplex::jet::seed_point;
use paraplex::Cx;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let e = expr::parse("exp(re(Z1*conj(Z2))/2) + abs2(Z1)/5")?;
    println!("parsed:    {e}");
    println!("variables: {:?}", e.variables());

    let mut b = BindingSet::<f64>::new();
    b.set("Z1", Cx::new(0.3, -0.2)).set("Z2", Cx::new(0.5, 0.1));
    println!("value:     {:?}", expr::eval(&e, &b)?);

    // same expression on the real chart (x0, x1, x2, x3), with derivatives
    let f = ExprField::new("exp(re(Z1*conj(Z2))/2) + abs2(Z1)/5", ChartBinding::complex(["Z1", "Z2"]))?;
    let j = f.eval_real(&seed_point([0.3, -0.2, 0.5, 0.1]))?;
    println!("value {:.6}  grad {:.6?}", j.value, j.grad);
    println!("hessian diagonal {:.6?}", (0..4).map(|k| j.hess[k][k]).collect::<Vec<_>>());

    if let Err(err) = expr::parse("sin(Z1") {
        println!("bad input: {err}");
    }
    Ok(())
}
