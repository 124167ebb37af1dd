#ifndef CHSBS_CHSBS_H
#define CHSBS_CHSBS_H

#include <stddef.h>

#if defined(CHSBS_BUILDING)
#define CHSBS_API __attribute__((visibility("default")))
#else
#define CHSBS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum chsbs_status {
  CHSBS_OK = 0,
  CHSBS_INVALID_ARGUMENT = 1,
  CHSBS_DOMAIN = 2,
  CHSBS_CRITICALITY = 3,
  CHSBS_NO_SIGN_CHANGE = 4,
  CHSBS_FIT_REJECTED = 5,
  CHSBS_QUADRATURE = 6,
  CHSBS_SINGULAR = 7,
  CHSBS_BUFFER_TOO_SMALL = 8,
  CHSBS_INTERNAL = 9
} chsbs_status;

/* Parameters plus options. Setters must not race with other calls on the same
   context; queries only read it and may run concurrently. */
typedef struct chsbs_context chsbs_context;
typedef struct chsbs_verify_report chsbs_verify_report;

CHSBS_API const char* chsbs_version(void);
CHSBS_API const char* chsbs_status_string(chsbs_status status);
/* Message of the last failure on the calling thread ("" if none). */
CHSBS_API const char* chsbs_last_error(void);

CHSBS_API chsbs_status chsbs_context_create(chsbs_context** out);
CHSBS_API void chsbs_context_destroy(chsbs_context* ctx);

/* ------------------------------------------------------------------ setup */

CHSBS_API chsbs_status chsbs_set_model(chsbs_context* ctx, double gtilde, double delta_c, double fermi_energy,
                                       double fermi_momentum, double q0);
CHSBS_API chsbs_status chsbs_set_lifetime_constant(chsbs_context* ctx, double inverse_tau);
CHSBS_API chsbs_status chsbs_set_lifetime_fermi_liquid(chsbs_context* ctx);
/* "canonical", "eq-bs-u-freq", "subsec-tc" */
CHSBS_API chsbs_status chsbs_set_convention(chsbs_context* ctx, const char* name);
/* "physical" (w = 8 c2), "simplified" (w = 1) */
CHSBS_API chsbs_status chsbs_set_weight(chsbs_context* ctx, const char* name);
/* "binomial", "leading-pole" */
CHSBS_API chsbs_status chsbs_set_fock_form(chsbs_context* ctx, const char* name);
/* fractions of E_F */
CHSBS_API chsbs_status chsbs_set_scan(chsbs_context* ctx, double scan_min, double scan_max, int points);
CHSBS_API chsbs_status chsbs_set_gamma_window(chsbs_context* ctx, double t_min, double t_max, int points);
CHSBS_API chsbs_status chsbs_set_nu_window(chsbs_context* ctx, double t_min, double t_max, int points);
CHSBS_API chsbs_status chsbs_set_xi_reduced_t(chsbs_context* ctx, double reduced_t);
CHSBS_API chsbs_status chsbs_set_correlation_tolerance(chsbs_context* ctx, double rel_tol, double max_rel_error);
/* Test hook: corrupts one hierarchy coefficient so the series oracle must fail. */
CHSBS_API chsbs_status chsbs_set_fault_injection(chsbs_context* ctx, int enabled);

/* Writes the canonical spelling of a photon state ("vacuum", "fock:3", "thermal",
   "thermal:beta=2", "mix:{0:0.5,2:0.5}"). */
CHSBS_API chsbs_status chsbs_canonical_state(const char* state, char* buffer, size_t size);

/* ---------------------------------------------------------------- queries */

typedef struct chsbs_tc_result {
  double t_c;
  double bracket_lo;
  double bracket_hi;
  double residual;
  double dm_dt;
  int sign_changes;
  int multiple_roots;
  int thermal_mode;
} chsbs_tc_result;

typedef struct chsbs_fit_result {
  double exponent; /* NaN when rejected */
  double t_min;
  double t_max;
  int points;
  double r_squared;
  double residual_max;
  int accepted;
  char diagnostic[256];
} chsbs_fit_result;

typedef struct chsbs_kernel {
  double temperature;
  double gamma0;
  double a_bcs;
  double c2;
  double w;
  double m_vac;
  double m_th;
} chsbs_kernel;

CHSBS_API chsbs_status chsbs_kernel_scalars(const chsbs_context* ctx, double T, chsbs_kernel* out);
/* M_vac for Fock-diagonal states, the thermal mass for thermal ones. */
CHSBS_API chsbs_status chsbs_critical_function(const chsbs_context* ctx, const char* state, double T, double* out);
CHSBS_API chsbs_status chsbs_find_tc(const chsbs_context* ctx, const char* state, chsbs_tc_result* out);
CHSBS_API chsbs_status chsbs_onshell_vertex(const chsbs_context* ctx, const char* state, double T, double* out);
/* Writes up to capacity poles; *count gets the total found. */
CHSBS_API chsbs_status chsbs_vertex_poles(const chsbs_context* ctx, const char* state, double* poles,
                                          size_t capacity, size_t* count);
CHSBS_API chsbs_status chsbs_fock_hierarchy(const chsbs_context* ctx, double T, int n, double* values);
CHSBS_API chsbs_status chsbs_mass_slope(const chsbs_context* ctx, const char* state, double* out);
CHSBS_API chsbs_status chsbs_fit_gamma(const chsbs_context* ctx, const char* state, chsbs_fit_result* out);
CHSBS_API chsbs_status chsbs_fit_nu(const chsbs_context* ctx, const char* state, chsbs_fit_result* out);
/* Correlation length at T = T_c (1 + reduced_t); *second_moment gets the small-P estimate. */
CHSBS_API chsbs_status chsbs_correlation_length(const chsbs_context* ctx, const char* state, double reduced_t,
                                                double* xi, double* second_moment);
CHSBS_API chsbs_status chsbs_bcs_quadrature(const chsbs_context* ctx, double T, double* ratio,
                                            double* delta_c_tau, double* error_estimate);
CHSBS_API chsbs_status chsbs_offshell_cancellation(const chsbs_context* ctx, double T, double* depth,
                                                   double* relative_to_onshell);

/* Exact series oracle for a rational kernel given as "p/q" strings. *equal is 1 when the
   hierarchy matches the closed-form series for every n <= order. */
CHSBS_API chsbs_status chsbs_oracle_check(const char* gamma0, const char* a_bcs, const char* c2, int order,
                                          int* equal);

/* ----------------------------------------------------------- verification */

CHSBS_API chsbs_status chsbs_verify(const chsbs_context* ctx, chsbs_verify_report** out);
CHSBS_API void chsbs_verify_report_destroy(chsbs_verify_report* report);
CHSBS_API size_t chsbs_verify_count(const chsbs_verify_report* report);
CHSBS_API int chsbs_verify_all_passed(const chsbs_verify_report* report);
/* Accessors return NULL / NaN for an index out of range. */
CHSBS_API const char* chsbs_verify_name(const chsbs_verify_report* report, size_t i);
CHSBS_API int chsbs_verify_passed(const chsbs_verify_report* report, size_t i);
CHSBS_API double chsbs_verify_value(const chsbs_verify_report* report, size_t i);
CHSBS_API double chsbs_verify_tolerance(const chsbs_verify_report* report, size_t i);
CHSBS_API double chsbs_verify_seconds(const chsbs_verify_report* report, size_t i);
CHSBS_API const char* chsbs_verify_detail(const chsbs_verify_report* report, size_t i);

#ifdef __cplusplus
}
#endif

#endif
