#include <pybind11/pybind11.h>
PYBIND11_MODULE(_fracperim, m) { m.doc() = "wip"; }
