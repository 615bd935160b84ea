"""Built-in explicit Runge-Kutta methods."""

from essrate.stability.models import RkMethod

EULER = RkMethod(
    name="euler",
    order=1,
    butcher_a=((0.0,),),
    butcher_b=(1.0,),
    butcher_c=(0.0,),
)

HEUN = RkMethod(
    name="heun",
    order=2,
    butcher_a=((0.0, 0.0), (1.0, 0.0)),
    butcher_b=(0.5, 0.5),
    butcher_c=(0.0, 1.0),
)

# Kutta's third-order method
RK3 = RkMethod(
    name="rk3",
    order=3,
    butcher_a=((0.0, 0.0, 0.0), (0.5, 0.0, 0.0), (-1.0, 2.0, 0.0)),
    butcher_b=(1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0),
    butcher_c=(0.0, 0.5, 1.0),
)

RK4 = RkMethod(
    name="rk4",
    order=4,
    butcher_a=(
        (0.0, 0.0, 0.0, 0.0),
        (0.5, 0.0, 0.0, 0.0),
        (0.0, 0.5, 0.0, 0.0),
        (0.0, 0.0, 1.0, 0.0),
    ),
    butcher_b=(1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0),
    butcher_c=(0.0, 0.5, 0.5, 1.0),
)

BUILTIN_METHODS: dict[str, RkMethod] = {m.name: m for m in (EULER, HEUN, RK3, RK4)}

METHOD_ALIASES: dict[str, str] = {"rk2": "heun", "rk1": "euler"}
