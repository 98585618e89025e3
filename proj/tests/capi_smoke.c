/* Plain C client: the header must compile as C and the library must work
 * without any C++ on the caller's side. */
#include <stdio.h>
#include <string.h>

#include "lazyconv.h"

int main(void) {
  lc_defs* defs = NULL;
  lc_result* res = NULL;
  lc_options opts;
  uint64_t transitions = 0;
  char* nf = NULL;
  int ok = 1;

  if (lc_defs_parse("data Nat := O 0 | S 1;\n"
                    "def plus := \\m n. match m with O -> n | S p -> S (plus p n) end;",
                    &defs) != LC_OK) {
    fprintf(stderr, "parse: %s\n", lc_last_error());
    return 1;
  }
  lc_options_default(&opts);
  opts.check_invariants = 1;
  if (lc_check(defs, "plus 2 3", "5", &opts, 100000, NULL, NULL, &res) != LC_OK) return 1;
  ok &= lc_result_verdict(res) == LC_CONVERTIBLE;
  ok &= lc_result_stat(res, "transitions", &transitions) == LC_OK && transitions > 0;
  lc_result_free(res);

  if (lc_normalize(defs, "\\x. plus 1 x", NULL, 100000, &nf, NULL) != LC_OK) return 1;
  ok &= nf != NULL && strcmp(nf, "\\x. S x") == 0;
  lc_string_free(nf);

  ok &= lc_check(defs, "plus (", "O", NULL, 10, NULL, NULL, &res) == LC_ERR_PARSE;
  lc_defs_free(defs);
  printf("%s\n", ok ? "ok" : "FAILED");
  return ok ? 0 : 1;
}
