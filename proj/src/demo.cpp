#include "wsr/presentation.hpp"

namespace wsr {

GeneratorMap demo_monomorphism() {
  GeneratorMap f;
  f.domain.add(5, 10);
  f.domain.add(7, 10);
  f.domain.add(8, 13);
  f.codomain.add(4, 6);
  f.codomain.add(2, 9);
  f.codomain.add(3, 10);
  f.codomain.add(5, 11);
  f.codomain.add(0, 12);
  f.codomain.add(1, 13);
  f.images = {{0, 2}, {1, 2}, {3, 4, 5}};
  return f;
}

}  // namespace wsr
