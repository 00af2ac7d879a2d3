/* tslint:disable */
/* eslint-disable */

/**
 * The E1 (`page = 1`) or E2 (`page = 2`) page on columns `(d - r, d]` as JSON.
 */
export function ehp_page(d: number, r: number, page: number): string;

/**
 * Ext over A of F2 for `s <= max_s`, `t <= max_t` as `s,t,dim` CSV.
 */
export function sphere_ext_csv(max_s: number, max_t: number): string;

/**
 * Admissible monomials of one degree as a JSON array of strings.
 */
export function steenrod_basis(degree: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly ehp_page: (a: number, b: number, c: number) => [number, number, number, number];
    readonly sphere_ext_csv: (a: number, b: number) => [number, number, number, number];
    readonly steenrod_basis: (a: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
