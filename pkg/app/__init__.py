"""etwist: 전기장 스핀-궤도 결합 스펙트럼 시뮬레이터"""
