/* invariant: x^2 + y^2 - 3*x - y = 0
 * orbit: niven-rotation-block on coordinates 0,1 with half-trace 3/5
 * Q(p, q) is the exact rational p/q
 */
Q x = Q(2, 1), y = Q(2, 1);
while (nondet()) {
    Q x_next = Q(3, 5) * x + Q(-4, 5) * y + Q(1, 1);
    Q y_next = Q(4, 5) * x + Q(3, 5) * y + Q(-1, 1);
    x = x_next;
    y = y_next;
}
