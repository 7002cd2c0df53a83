/* Compiled as C to make sure the public header is valid C and the library
 * is usable without a C++ front end. */
#include <stdio.h>
#include <string.h>

#include "cwpaint/cwpaint.h"

#define EXPECT(cond)                                            \
  do {                                                          \
    if (!(cond)) {                                              \
      snprintf(msg, cap, "%s:%d: %s", __FILE__, __LINE__, #cond); \
      goto done;                                                \
    }                                                           \
  } while (0)

int capi_c_smoke(char* msg, size_t cap) {
  int ok = 0;
  cwp_graph* g = NULL;
  cwp_batch* b = NULL;
  cwp_exact* e = NULL;
  cwp_walk_config cfg = cwp_walk_config_default();
  cwp_exact_options opt = cwp_exact_options_default();
  cwp_outcome o;
  cwp_batch_summary s;
  uint64_t nb[8];
  size_t count = 0;
  double law[3];
  const uint64_t k2[2] = {0, 1};
  cwp_graph* pair = NULL;
  cwp_graph* bad = NULL;

  msg[0] = '\0';
  EXPECT(strlen(cwp_version()) > 0);
  EXPECT(cwp_graph_create("hypercube:n=4", 0, &g) == CWP_OK);
  EXPECT(cwp_graph_vertex_count(g) == 16);
  EXPECT(cwp_graph_neighbors(g, 0, nb, 8, &count) == CWP_OK);
  EXPECT(count == 4);

  EXPECT(cwp_paint_run(g, &cfg, CWP_FIRST_PAINTED, 1, 0, 0, &o) == CWP_OK);
  EXPECT(o.a1_count + o.a2_count == 16);

  EXPECT(cwp_paint_batch(g, &cfg, CWP_FIRST_PAINTED, 3, 50, 2, 0, &b) == CWP_OK);
  EXPECT(cwp_batch_runs(b) == 50);
  EXPECT(cwp_batch_summarize(b, 16, 0.95, &s) == CWP_OK);
  EXPECT(s.runs == 50);

  EXPECT(cwp_exact_analyze(g, &opt, &e) == CWP_OK);
  EXPECT(cwp_exact_t_mix(e) > 0);
  EXPECT(cwp_exact_f_statistic(e) > 0.0);

  EXPECT(cwp_graph_create_explicit(2, k2, 1, &pair) == CWP_OK);
  EXPECT(cwp_painting_law(pair, &cfg, law, 3) == CWP_OK);
  EXPECT(law[0] > 0.124 && law[0] < 0.126);

  EXPECT(cwp_graph_create("nonsense", 0, &bad) == CWP_ERR_INVALID_ARGUMENT);
  EXPECT(bad == NULL);
  EXPECT(strlen(cwp_last_error()) > 0);
  ok = 1;
done:
  cwp_exact_destroy(e);
  cwp_batch_destroy(b);
  cwp_graph_destroy(pair);
  cwp_graph_destroy(g);
  return ok;
}
