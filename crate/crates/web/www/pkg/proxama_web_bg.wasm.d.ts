/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_get_svmresult_extent: (a: number) => number;
export const __wbg_get_svmresult_iterations: (a: number) => number;
export const __wbg_get_svmresult_labels: (a: number) => [number, number];
export const __wbg_get_svmresult_points: (a: number) => [number, number];
export const __wbg_get_svmresult_surface: (a: number) => [number, number];
export const __wbg_get_svmresult_train_error_pct: (a: number) => number;
export const __wbg_get_tvresult_feasibility: (a: number) => [number, number];
export const __wbg_get_tvresult_isnr: (a: number) => [number, number];
export const __wbg_get_tvresult_objective: (a: number) => [number, number];
export const __wbg_get_tvresult_observed: (a: number) => [number, number];
export const __wbg_get_tvresult_original: (a: number) => [number, number];
export const __wbg_get_tvresult_reconstructed: (a: number) => [number, number];
export const __wbg_set_svmresult_extent: (a: number, b: number) => void;
export const __wbg_set_svmresult_iterations: (a: number, b: number) => void;
export const __wbg_set_svmresult_labels: (a: number, b: number, c: number) => void;
export const __wbg_set_svmresult_points: (a: number, b: number, c: number) => void;
export const __wbg_set_svmresult_surface: (a: number, b: number, c: number) => void;
export const __wbg_set_svmresult_train_error_pct: (a: number, b: number) => void;
export const __wbg_set_tvresult_feasibility: (a: number, b: number, c: number) => void;
export const __wbg_set_tvresult_isnr: (a: number, b: number, c: number) => void;
export const __wbg_set_tvresult_objective: (a: number, b: number, c: number) => void;
export const __wbg_set_tvresult_observed: (a: number, b: number, c: number) => void;
export const __wbg_set_tvresult_original: (a: number, b: number, c: number) => void;
export const __wbg_set_tvresult_reconstructed: (a: number, b: number, c: number) => void;
export const __wbg_svmresult_free: (a: number, b: number) => void;
export const __wbg_tvresult_free: (a: number, b: number) => void;
export const prox_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
export const svm_surface: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
export const tv_deblur: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;
