#include <stdio.h>
#include "dgsymp.h"
int main(void) {
  DgsympAlgebra *a = NULL;
  if (dgsymp_algebra_parse("field Q; gen x : 0; gen y : -1; D y = x^2;", &a) != DGSYMP_STATUS_OK) return 1;
  DgsympTruncation t = { -4, 1, 4, 6, 3 };
  char *r = NULL;
  DgsympStatus s = dgsymp_darboux(a, "d(y)^d(x)", 1, "witness { lagrangian d(x); }", t, &r);
  printf("%d %s\n", s, r);
  dgsymp_string_free(r);
  dgsymp_algebra_free(a);
  return s;
}
